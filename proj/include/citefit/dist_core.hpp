#ifndef CITEFIT_DIST_CORE_HPP
#define CITEFIT_DIST_CORE_HPP

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace citefit {

// ---------------------------------------------------------------------------
// Parameter records. Aggregates on purpose; validate_params() enforces the
// invariants, canonical() produces the unique ordered representation.
// ---------------------------------------------------------------------------

struct MaxEntParams {
  double beta;  // > 0
};

struct WaldParams {
  double mu;      // mean of the processing time, > 0
  double lambda;  // shape, > 0; variance is mu^3 / lambda
};

struct WEComponent {
  double c;  // weight in (0, 1]
  WaldParams wald;
};

// Mixture of 1..3 Wald-Exponential components, weights summing to 1 within
// 1e-12, canonically ordered by descending weight (ties by ascending mu).
struct WEMixtureParams {
  std::vector<WEComponent> components;
};

struct LomaxComponent {
  double c;  // weight in (0, 1]
  double b;  // scale, > 0
  double v;  // tail exponent, > 0
};

struct LomaxMixtureParams {
  std::vector<LomaxComponent> components;
};

struct PowerLawComponent {
  double c;      // weight in (0, 1]
  double gamma;  // exponent; > 1 required when support is unbounded
};

// kmax <= 0 means unbounded support {1, 2, ...}; otherwise support is {1..kmax}.
struct PowerLawParams {
  std::vector<PowerLawComponent> components;
  std::int64_t kmax = 0;
};

void validate_params(const MaxEntParams& p);
void validate_params(const WaldParams& p);
void validate_params(const WEMixtureParams& p);
void validate_params(const LomaxMixtureParams& p);
void validate_params(const PowerLawParams& p);

WEMixtureParams canonical(WEMixtureParams p);
LomaxMixtureParams canonical(LomaxMixtureParams p);
PowerLawParams canonical(PowerLawParams p);

// ---------------------------------------------------------------------------
// Geometric MaxEnt kernel on {1, 2, ...}.
// ---------------------------------------------------------------------------

// (e^beta - 1) e^(-s beta); sums to 1 over s >= 1.
double maxent_pmf(std::int64_t s, const MaxEntParams& p);
double maxent_log_pmf(std::int64_t s, const MaxEntParams& p);
// Mean is exactly 1 / maxent_pmf(1) by construction.
double maxent_mean(const MaxEntParams& p);

// ---------------------------------------------------------------------------
// Wald (inverse Gaussian) processing-time law and the density of beta = 1/tau.
// ---------------------------------------------------------------------------

double wald_pdf(double tau, const WaldParams& p);
// CDF/SF via the scaled complementary error function; no overflow for any
// parameter scale, and the survival function keeps relative accuracy in the
// far right tail.
double wald_cdf(double tau, const WaldParams& p);
double wald_sf(double tau, const WaldParams& p);

// Density of the reciprocal variable beta = 1/tau (reciprocal inverse
// Gaussian). Mean 1/mu + 1/lambda, variance (2 mu + lambda) / (mu lambda^2).
double rig_pdf(double beta, const WaldParams& p);

// ---------------------------------------------------------------------------
// Wald-Exponential mixture: counts on {1, 2, ...}.
// ---------------------------------------------------------------------------

// Single-component survival P(K > k) = sqrt(lambda/(2k+lambda)) *
// exp((lambda - sqrt(lambda(2k+lambda)))/mu), evaluated in a cancellation-free
// form; exactly 1 at k = 0. Accepts real k >= 0 (the same formula is the
// continuous-model CCDF).
double we_ccdf(double k, const WaldParams& p);
double we_log_ccdf(double k, const WaldParams& p);

// Mixture CCDF and PMF. we_pmf(k) telescopes: partial sums plus the mixture
// CCDF remainder equal 1 to within accumulated rounding.
double we_ccdf(double k, const WEMixtureParams& p);
double we_pmf(std::int64_t k, const WEMixtureParams& p);
// Log-space twin, usable where the linear form underflows.
double we_log_pmf(std::int64_t k, const WEMixtureParams& p);

// Continuous analog: density on x >= 0 whose CCDF is we_ccdf(x). Limits:
// lambda -> inf gives the exponential density, mu -> inf gives the pure
// power-law mode sqrt(lambda) (2x+lambda)^(-3/2).
double we_continuous_pdf(double x, const WaldParams& p);

// ---------------------------------------------------------------------------
// Lomax mixture on {1, 2, ...}.
// ---------------------------------------------------------------------------

// Component survival P(K > k) = (1 + k/b)^(-v), continuous in k >= 0.
double lomax_ccdf(double k, const LomaxComponent& comp);
double lomax_ccdf(double k, const LomaxMixtureParams& p);
double lomax_pmf(std::int64_t k, const LomaxMixtureParams& p);
double lomax_log_pmf(std::int64_t k, const LomaxMixtureParams& p);

// ---------------------------------------------------------------------------
// Power-law baselines on {1..kmax} or {1, 2, ...}.
// ---------------------------------------------------------------------------

// log of the normalizing sum Z = sum k^-gamma over the support. Throws when
// gamma <= 1 on unbounded support.
double powerlaw_log_z(double gamma, std::int64_t kmax);
// Unnormalized tail sum_{k >= a} k^-gamma for gamma > 1, closed form; accurate
// to ~1e-14 relative once a >= 257 (used beyond the direct-summation cutoff).
double powerlaw_tail_sum(double a, double gamma);
double powerlaw_pmf(std::int64_t k, const PowerLawParams& p);
double powerlaw_log_pmf(std::int64_t k, const PowerLawParams& p);
// P(K > k); zero at and beyond kmax on bounded support.
double powerlaw_ccdf(std::int64_t k, const PowerLawParams& p);

// ---------------------------------------------------------------------------
// Gamma processing-time alternative.
// ---------------------------------------------------------------------------

double gamma_pdf(double tau, double shape, double scale);
double gamma_sf(double tau, double shape, double scale);

// ---------------------------------------------------------------------------
// Model dispatch: one value that can hold any fitted family.
// ---------------------------------------------------------------------------

enum class ModelFamily { we, lomax, powerlaw };

using ModelSpec = std::variant<WEMixtureParams, LomaxMixtureParams, PowerLawParams>;

ModelFamily family_of(const ModelSpec& m);
int n_components(const ModelSpec& m);
// Free parameters under MLE: 3M-1 for WE and Lomax, 2M-1 for power law
// (weights lose one to the sum constraint; kmax is structural, not fitted).
int n_free_params(const ModelSpec& m);

double model_pmf(const ModelSpec& m, std::int64_t k);
double model_log_pmf(const ModelSpec& m, std::int64_t k);
double model_ccdf(const ModelSpec& m, std::int64_t k);
void validate_model(const ModelSpec& m);
ModelSpec canonical_model(ModelSpec m);

// ---------------------------------------------------------------------------
// Hazard rates of the continuous processing-time models.
// ---------------------------------------------------------------------------

struct CurveSeries {
  std::vector<double> x;
  std::vector<double> y;
};

struct WaldModel {
  WaldParams p;
};
struct GammaModel {
  double shape;
  double scale;
};
struct WEContinuousModel {
  WaldParams p;
};

using ContinuousModel = std::variant<WaldModel, GammaModel, WEContinuousModel>;

double continuous_pdf(const ContinuousModel& m, double t);
double continuous_sf(const ContinuousModel& m, double t);

// Pointwise f(t) / (1 - F(t)) on a strictly increasing positive grid. Throws
// when the survival function underflows, naming the first unusable t so the
// caller can truncate the grid.
CurveSeries hazard(const ContinuousModel& m, std::span<const double> grid);

// Large-t hazard limit of the Wald law: lambda / (2 mu^2).
double wald_hazard_asymptote(const WaldParams& p);

}  // namespace citefit

#endif
