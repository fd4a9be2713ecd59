#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "citefit/dist_core.hpp"
#include "citefit/histogram.hpp"
#include "citefit/sampler.hpp"

namespace citefit {

struct FitConfig {
  int n_restarts = 20;
  int max_iterations = 6000;
  double simplex_tolerance = 1e-10;
  std::vector<int> m_values = {1, 2, 3};
  // Offset that was added to raw counts at ingestion; the de-shifted scale is
  // only used to seed method-of-moments starts, never in the likelihood.
  int k_shift = 1;
};

struct FitResult {
  ModelSpec model;
  double loglik = -std::numeric_limits<double>::infinity();
  double aic = std::numeric_limits<double>::infinity();
  int n_free_params = 0;
  bool converged = false;
  // Number of restarts whose simplex met the tolerance before the iteration cap.
  int n_restarts_used = 0;
  std::uint64_t best_restart_seed = 0;
  // Base seed for the whole fit; restart r uses derive_seed(seed, r).
  std::uint64_t seed = 0;
  std::int64_t n_obs = 0;
  int k_shift = 1;
  // Populated by the goodness-of-fit pass, NaN / -1 until then.
  double chi2 = std::numeric_limits<double>::quiet_NaN();
  int dof = -1;
  double p_value = std::numeric_limits<double>::quiet_NaN();
};

// -sum_k freq(k) * log pmf(k). Throws if the pmf underflows to zero at an
// observed count (the error names the count).
double negative_loglik(const ModelSpec& model, const Histogram& h);

// Maximum-likelihood fit of one family at fixed component count M.
// Multi-start Nelder-Mead over log / additive-logistic transformed parameters;
// deterministic given (h, cfg, rng state). Draws exactly one u64 from rng.
// If no restart converges the result carries converged=false and the best
// point found, never a silent success.
FitResult fit_mle(ModelFamily family, int m, const Histogram& h, const FitConfig& cfg,
                  RngStream& rng);

struct SweepItem {
  int m = 0;
  bool ok = false;       // fit ran to completion and converged
  std::string error;     // reason when ok is false
  bool has_fit = false;  // fit field holds a result (even a non-converged one)
  FitResult fit;
};

struct SweepResult {
  std::vector<SweepItem> items;
  int selected = -1;  // index into items, -1 when nothing is selectable
};

// Fits every M in cfg.m_values and picks the minimal AIC among converged
// fits; AIC ties go to the smaller M. Per-M failures are recorded, not thrown.
SweepResult sweep_and_select(ModelFamily family, const Histogram& h, const FitConfig& cfg,
                             RngStream& rng);

namespace detail {

// Unconstrained <-> constrained codec used by the optimizer, exposed for
// round-trip testing. Layout: log positives per component, then M-1
// additive-logistic weight coordinates. Weights carry a 1e-6 floor so no
// component can collapse to zero mass during optimization.
std::vector<double> encode_params(const ModelSpec& model);
ModelSpec decode_params(ModelFamily family, int m, const std::vector<double>& theta);

}  // namespace detail

}  // namespace citefit
