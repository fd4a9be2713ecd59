#include "citefit/gof.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "citefit/special.hpp"

namespace citefit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Span {
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // -1 marks the infinite tail
  double obs = 0.0;
  double exp = 0.0;
};

}  // namespace

BinnedTest chi2_test(const ModelSpec& model, const Histogram& h, double min_expected, double alpha,
                     int n_free_override) {
  validate_model(model);
  if (h.bins.empty()) throw std::invalid_argument("chi2_test: histogram is empty");
  if (!(min_expected > 0.0)) throw std::invalid_argument("chi2_test: min_expected must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("chi2_test: alpha must be in (0,1)");

  // Atoms: one per observed count, one per gap between observed counts, and
  // an infinite tail, so the partition covers all of k >= 1.
  std::vector<Span> atoms;
  atoms.reserve(2 * h.bins.size() + 2);
  std::int64_t ptr = 1;
  for (const auto& [k, c] : h.bins) {
    if (k > ptr) atoms.push_back({ptr, k - 1, 0.0, 0.0});
    atoms.push_back({k, k, static_cast<double>(c), 0.0});
    ptr = k + 1;
  }
  atoms.push_back({ptr, -1, 0.0, 0.0});

  const double n = static_cast<double>(h.total_n);
  double ccdf_prev = model_ccdf(model, atoms.front().lo - 1);
  for (auto& a : atoms) {
    const double ccdf_hi = (a.hi < 0) ? 0.0 : model_ccdf(model, a.hi);
    a.exp = std::max(n * (ccdf_prev - ccdf_hi), 0.0);
    ccdf_prev = ccdf_hi;
  }

  // Right-to-left greedy merge; a deficient leftover on the far left joins
  // its right neighbour.
  std::vector<Span> bins;
  Span cur;
  bool open = false;
  for (std::size_t j = atoms.size(); j-- > 0;) {
    if (!open) {
      cur = Span{atoms[j].lo, atoms[j].hi, 0.0, 0.0};
      open = true;
    }
    cur.lo = atoms[j].lo;
    cur.obs += atoms[j].obs;
    cur.exp += atoms[j].exp;
    if (cur.exp >= min_expected) {
      bins.push_back(cur);
      open = false;
    }
  }
  if (open) {
    if (bins.empty()) {
      bins.push_back(cur);
    } else {
      bins.back().lo = cur.lo;
      bins.back().obs += cur.obs;
      bins.back().exp += cur.exp;
    }
  }
  std::reverse(bins.begin(), bins.end());

  const int n_free = n_free_override >= 0 ? n_free_override : n_free_params(model);
  const int dof = static_cast<int>(bins.size()) - 1 - n_free;
  if (dof < 1) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "chi2_test: infeasible, %zu bins after merging but %d are needed "
                  "for %d free parameters",
                  bins.size(), n_free + 2, n_free);
    throw std::runtime_error(msg);
  }

  BinnedTest t;
  t.alpha = alpha;
  t.min_expected = min_expected;
  t.n_free = n_free;
  t.dof = dof;
  double stat = 0.0;
  for (const auto& b : bins) {
    t.lower_edges.push_back(b.lo);
    t.observed.push_back(b.obs);
    t.expected.push_back(b.exp);
    if (b.exp <= 0.0) {
      if (b.obs > 0.0) stat = kInf;
      continue;
    }
    const double d = b.obs - b.exp;
    stat += d * d / b.exp;
  }
  t.statistic = stat;
  t.p_value = std::isfinite(stat) ? regularized_gamma_q(0.5 * dof, 0.5 * stat) : 0.0;
  t.reject = t.p_value < alpha;
  return t;
}

CurveSeries empirical_ccdf(const Histogram& h) {
  if (h.bins.empty()) throw std::invalid_argument("empirical_ccdf: histogram is empty");
  const double n = static_cast<double>(h.total_n);
  CurveSeries s;
  s.x.resize(h.bins.size());
  s.y.resize(h.bins.size());
  std::size_t i = h.bins.size();
  double cum = 0.0;
  for (auto it = h.bins.rbegin(); it != h.bins.rend(); ++it) {
    cum += static_cast<double>(it->second);
    --i;
    s.x[i] = static_cast<double>(it->first);
    s.y[i] = cum / n;
  }
  return s;
}

std::vector<ComparisonRow> compare_models(std::span<const FitResult> results, const Histogram& h,
                                          double min_expected, double alpha) {
  if (results.size() < 2) throw std::invalid_argument("compare_models: need at least two fits");
  std::vector<ComparisonRow> rows;
  rows.reserve(results.size());
  for (const auto& r : results) {
    if (r.n_obs != h.total_n) {
      throw std::invalid_argument("compare_models: fit sample size does not match histogram");
    }
    ComparisonRow row;
    row.family = family_of(r.model);
    row.m = n_components(r.model);
    row.n_params = r.n_free_params;
    row.loglik = r.loglik;
    row.aic = r.aic;
    try {
      row.p_value = chi2_test(r.model, h, min_expected, alpha).p_value;
    } catch (const std::exception&) {
      row.p_value = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) { return a.aic < b.aic; });
  for (auto& row : rows) row.delta_aic = row.aic - rows.front().aic;
  return rows;
}

}  // namespace citefit
