#ifndef CITEFIT_QUADRATURE_HPP
#define CITEFIT_QUADRATURE_HPP

#include <functional>
#include <span>

namespace citefit {

struct IntegralResult {
  double value = 0.0;
  double abs_error = 0.0;   // sum of per-panel estimates, conservative
  int subdivisions = 0;     // splits spent beyond the seed panels
  bool converged = false;
};

// Gauss-Kronrod 7-15 estimate of integral and error over one finite panel.
// Nodes are strictly interior, so integrable endpoint singularities are safe.
struct PanelEstimate {
  double value;
  double abs_error;
};
PanelEstimate gk15(const std::function<double(double)>& f, double a, double b);

// Globally adaptive quadrature over the union of [breakpoints[i], breakpoints[i+1]].
// Repeatedly bisects the worst panel until sum(err) <= max(abs_tol, rel_tol*|I|)
// or the subdivision budget is spent. A NaN integrand value aborts immediately
// with converged = false; the caller decides whether that is fatal.
IntegralResult integrate_adaptive(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  double rel_tol, double abs_tol,
                                  int max_subdivisions);

}  // namespace citefit

#endif
