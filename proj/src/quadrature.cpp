#include "citefit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace citefit {

namespace {

// 15-point Kronrod nodes on [0,1] side (symmetric) and weights, with the
// embedded 7-point Gauss weights on the odd-indexed nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double result_g = kWg[3] * fc;
  double result_k = kWgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    result_k += kWgk[j] * fsum;
    if (j % 2 == 1) result_g += kWg[j / 2] * fsum;
  }
  return {result_k * h, std::fabs(result_k - result_g) * h};
}

IntegralResult integrate_adaptive(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  double rel_tol, double abs_tol,
                                  int max_subdivisions) {
  if (breakpoints.size() < 2) {
    throw std::invalid_argument("integrate_adaptive: need at least two breakpoints");
  }
  std::vector<Panel> heap;
  heap.reserve(breakpoints.size() + static_cast<size_t>(std::max(max_subdivisions, 0)));

  double total_value = 0.0;
  double total_error = 0.0;
  // Error a panel cannot shed (width at the ulp limit) moves here; it stays in
  // the convergence test while the panel itself sinks to the bottom of the heap.
  double irreducible = 0.0;

  auto push_panel = [&](double a, double b) -> bool {
    auto [v, e] = gk15(f, a, b);
    if (std::isnan(v)) return false;
    total_value += v;
    total_error += e;
    heap.push_back({a, b, v, e});
    std::push_heap(heap.begin(), heap.end());
    return true;
  };

  IntegralResult res;
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) {
      throw std::invalid_argument("integrate_adaptive: breakpoints must be strictly increasing");
    }
    if (!push_panel(breakpoints[i], breakpoints[i + 1])) return res;
  }

  auto resum = [&] {
    // Kahan resummation over live panels removes drift from incremental updates.
    double s = 0.0, comp = 0.0, err = irreducible;
    for (const Panel& p : heap) {
      const double y = p.value - comp;
      const double t = s + y;
      comp = (t - s) - y;
      s = t;
      err += p.error;
    }
    total_value = s;
    total_error = err;
  };

  int splits = 0;
  while (true) {
    const double target = std::max(abs_tol, rel_tol * std::fabs(total_value));
    if (total_error <= target) {
      res.converged = true;
      break;
    }
    if (splits >= max_subdivisions) break;
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    if (worst.error == 0.0) {
      // Every live panel reports zero error; what remains cannot be refined away.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    total_value -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      total_value += worst.value;
      total_error += worst.error;
      irreducible += worst.error;
      heap.push_back({worst.a, worst.b, worst.value, 0.0});
      std::push_heap(heap.begin(), heap.end());
      continue;
    }
    if (!push_panel(worst.a, mid) || !push_panel(mid, worst.b)) return res;
    ++splits;
    if (splits % 64 == 0) resum();
  }

  resum();
  res.value = total_value;
  res.abs_error = total_error;
  res.subdivisions = splits;
  if (res.converged) {
    // Re-check after resummation so the reported state is self-consistent.
    res.converged = total_error <= std::max(abs_tol, rel_tol * std::fabs(total_value));
  }
  return res;
}

}  // namespace citefit
