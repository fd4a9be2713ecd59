#include "citefit/mix_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "citefit/kahan.hpp"
#include "citefit/quadrature.hpp"
#include "citefit/special.hpp"

namespace citefit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Once the log-integrand sits this far under its peak, the contribution is
// below the smallest subnormal and the domain walk can stop.
constexpr double kLogFloor = 746.0;

[[noreturn]] void fail(const char* fmt, double a, double b) {
  char msg[160];
  std::snprintf(msg, sizeof(msg), fmt, a, b);
  throw OracleError(msg);
}

}  // namespace

void validate_config(const QuadratureConfig& cfg) {
  const bool tol_ok = cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0 && cfg.abs_tol > 0.0 &&
                      cfg.abs_tol < 1.0;
  if (!tol_ok || cfg.max_subdivisions < 16) {
    throw std::invalid_argument(
        "quadrature config: tolerances must lie in (0,1) and max_subdivisions >= 16");
  }
}

MixingDensity rig_density(const WaldParams& p) {
  validate_params(p);
  const double mean = 1.0 / p.mu + 1.0 / p.lambda;
  const double sd = std::sqrt((2.0 * p.mu + p.lambda) / (p.mu * p.lambda * p.lambda));
  auto lp = [p](double b) {
    const double d = b - 1.0 / p.mu;
    return 0.5 * (std::log(p.lambda) - std::log(2.0 * M_PI * b)) - p.lambda * d * d / (2.0 * b);
  };
  return {lp, mean, sd};
}

MixingDensity gamma_density(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("gamma_density: shape and rate must be positive");
  }
  const double norm = shape * std::log(rate) - std::lgamma(shape);
  auto lp = [shape, rate, norm](double b) {
    return norm + (shape - 1.0) * std::log(b) - rate * b;
  };
  return {lp, shape / rate, std::sqrt(shape) / rate};
}

MixingDensity spike_density(double beta0) {
  if (!(beta0 > 0.0)) throw std::domain_error("spike_density: beta0 must be positive");
  const double sigma = 1e-6 * beta0;
  // beta0 / sigma = 1e4 standard deviations of headroom to the beta = 0 wall,
  // so the truncated-normal correction is far below double precision.
  const double norm = -0.5 * std::log(2.0 * M_PI * sigma * sigma);
  auto lp = [beta0, sigma, norm](double b) {
    const double z = (b - beta0) / sigma;
    return norm - 0.5 * z * z;
  };
  return {lp, beta0, sigma};
}

namespace {

// log of the full integrand at one point.
double log_integrand(double beta, std::int64_t k, const MixingDensity& g) {
  const double lg = g.log_pdf(beta);
  if (lg == -kInf) return -kInf;
  return log_expm1(beta) - static_cast<double>(k) * beta + lg;
}

// Candidate abscissae for locating the peak: doublings away from the hinted
// center in both directions, plus a few scale-sized offsets around it.
std::vector<double> scan_points(const MixingDensity& g) {
  std::vector<double> pts;
  pts.reserve(110);
  for (int j = -48; j <= 48; ++j) pts.push_back(g.center * std::ldexp(1.0, j));
  for (double t : {-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double b = g.center + t * g.scale;
    if (b > 0.0) pts.push_back(b);
  }
  return pts;
}

}  // namespace

double mixed_log_pmf(std::int64_t k, const MixingDensity& g, const QuadratureConfig& cfg) {
  validate_config(cfg);
  if (k < 1) throw std::domain_error("mixed_pmf: k must be >= 1");
  if (!(g.center > 0.0) || !(g.scale > 0.0)) {
    throw std::invalid_argument("mixing density: center and scale hints must be positive");
  }

  double shift = -kInf;
  for (double b : scan_points(g)) shift = std::max(shift, log_integrand(b, k, g));
  if (shift == -kInf || std::isnan(shift)) {
    fail("oracle: integrand vanished on the whole scan grid (k = %.0f, center = %g)",
         static_cast<double>(k), g.center);
  }

  // Walk doublings outward from the center until the integrand is dead on both
  // flanks; these become the seed panels. The left side always closes with a
  // panel down to beta = 0 (GK nodes never touch endpoints), so a slowly
  // decaying left flank costs refinement work but loses no mass.
  std::vector<double> bp{g.center};
  for (int j = 1; j <= 200; ++j) {
    const double b = g.center * std::ldexp(1.0, -j);
    bp.push_back(b);
    if (log_integrand(b, k, g) < shift - kLogFloor) break;
  }
  for (int j = 1; j <= 200; ++j) {
    const double b = g.center * std::ldexp(1.0, j);
    bp.push_back(b);
    if (log_integrand(b, k, g) < shift - kLogFloor) break;
    if (j == 200) fail("oracle: right flank never decayed (k = %.0f, center = %g)",
                       static_cast<double>(k), g.center);
  }
  // Panels of roughly scale width around the center keep narrow spikes visible
  // to the seed rule rather than hoping refinement stumbles onto them.
  for (double t : {-8.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 8.0}) {
    const double b = g.center + t * g.scale;
    if (b > 0.0) bp.push_back(b);
  }
  bp.push_back(0.0);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(),
                       [](double a, double b) { return b - a <= 1e-12 * std::max(a, b); }),
           bp.end());

  auto f = [&](double b) { return std::exp(log_integrand(b, k, g) - shift); };
  const auto r = integrate_adaptive(f, bp, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
  if (!r.converged) {
    fail("oracle: quadrature did not converge (k = %.0f, estimated error %.3g)",
         static_cast<double>(k), r.abs_error);
  }
  if (!(r.value > 0.0)) {
    fail("oracle: nonpositive mass %.3g at k = %.0f", r.value, static_cast<double>(k));
  }
  return std::log(r.value) + shift;
}

double mixed_pmf(std::int64_t k, const MixingDensity& g, const QuadratureConfig& cfg) {
  return std::exp(mixed_log_pmf(k, g, cfg));
}

double mixed_pmf_mixture(std::int64_t k, std::span<const double> weights,
                         std::span<const MixingDensity> densities,
                         const QuadratureConfig& cfg) {
  if (weights.size() != densities.size() || weights.empty()) {
    throw std::invalid_argument("mixed_pmf_mixture: need matching weights and densities");
  }
  KahanSum wsum;
  for (double w : weights) {
    if (!(w >= 0.0) || !(w <= 1.0)) {
      throw std::invalid_argument("mixed_pmf_mixture: weights must lie in [0, 1]");
    }
    wsum.add(w);
  }
  if (std::fabs(wsum.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("mixed_pmf_mixture: weights must sum to 1 within 1e-12");
  }
  KahanSum acc;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;  // degenerate weight: component plays no role
    acc.add(weights[i] * mixed_pmf(k, densities[i], cfg));
  }
  return acc.value();
}

}  // namespace citefit
