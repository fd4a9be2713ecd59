#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "citefit/dist_core.hpp"
#include "citefit/fit.hpp"
#include "citefit/histogram.hpp"

namespace citefit {

// Pearson chi-squared over contiguous integer bins. Bin i covers
// [lower_edges[i], lower_edges[i+1]-1]; the last bin runs to infinity, so the
// bins partition all of k >= 1 and expected counts sum to the sample size.
struct BinnedTest {
  std::vector<std::int64_t> lower_edges;
  std::vector<double> observed;
  std::vector<double> expected;
  double statistic = 0.0;
  int dof = 0;
  int n_free = 0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.1;
  double min_expected = 5.0;
};

// Bins start from single-count atoms plus the gaps between observed counts
// and an infinite tail, then merge right-to-left until every expected count
// reaches min_expected. dof = n_bins - 1 - n_free. n_free_override < 0 takes
// the free-parameter count from the model; pass 0 to test a fully specified
// model. Throws when merging cannot leave dof >= 1.
BinnedTest chi2_test(const ModelSpec& model, const Histogram& h, double min_expected = 5.0,
                     double alpha = 0.1, int n_free_override = -1);

// Points (k, fraction of observations >= k) for each observed k.
CurveSeries empirical_ccdf(const Histogram& h);

struct ComparisonRow {
  ModelFamily family{};
  int m = 0;
  int n_params = 0;
  double loglik = 0.0;
  double aic = 0.0;
  double delta_aic = 0.0;
  double p_value = 0.0;
};

// Ranks fits of the same histogram by AIC; p-values come from chi2_test (NaN
// when the test is infeasible for a model). Throws if any fit was made on a
// different sample size than h.
std::vector<ComparisonRow> compare_models(std::span<const FitResult> results, const Histogram& h,
                                          double min_expected = 5.0, double alpha = 0.1);

}  // namespace citefit
