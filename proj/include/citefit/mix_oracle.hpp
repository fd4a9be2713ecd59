#ifndef CITEFIT_MIX_ORACLE_HPP
#define CITEFIT_MIX_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>

#include "citefit/dist_core.hpp"

namespace citefit {

// Brute-force numerical realization of the parameter-mix construction:
// p(k) = integral over beta > 0 of (e^beta - 1) e^(-k beta) g(beta) dbeta.
// Exists to cross-check every closed form; never used in the fitting path.

struct QuadratureConfig {
  double rel_tol = 1e-10;
  // Absolute tolerance applies to the peak-normalized integrand, so deep-tail
  // probabilities keep their relative accuracy instead of being declared
  // converged by an absolute test they trivially pass.
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
};

// Tolerances must lie in (0, 1) and max_subdivisions must be at least 16.
void validate_config(const QuadratureConfig& cfg);

// The oracle never silently returns a bad value; any convergence problem
// surfaces as this exception.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mixing density over beta > 0: its log-density plus hints for locating the
// mass. center should sit in the bulk (mode or mean); scale is a characteristic
// width. The hints only seed the search; adaptivity does the rest.
struct MixingDensity {
  std::function<double(double)> log_pdf;
  double center;
  double scale;
};

// Density of beta = 1/tau with tau Wald-distributed.
MixingDensity rig_density(const WaldParams& p);
// Gamma density on beta with the given shape and rate.
MixingDensity gamma_density(double shape, double rate);
// Narrow Gaussian spike at beta0 (sigma = 1e-6 beta0), standing in for a point
// mass; mixing against it must reproduce the plain geometric kernel.
MixingDensity spike_density(double beta0);

double mixed_pmf(std::int64_t k, const MixingDensity& g, const QuadratureConfig& cfg);
// Log-space twin for probabilities beyond linear double range.
double mixed_log_pmf(std::int64_t k, const MixingDensity& g, const QuadratureConfig& cfg);

// Weighted sum of mixed_pmf over components. Weights must sum to 1 within
// 1e-12; zero weights are allowed and skip their component entirely.
double mixed_pmf_mixture(std::int64_t k, std::span<const double> weights,
                         std::span<const MixingDensity> densities,
                         const QuadratureConfig& cfg);

}  // namespace citefit

#endif
