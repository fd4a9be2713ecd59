#ifndef CITEFIT_BATCH_HPP
#define CITEFIT_BATCH_HPP

#include <cstdint>
#include <vector>

#include "citefit/dist_core.hpp"
#include "citefit/histogram.hpp"

namespace citefit {

// Precomputed, parameter-independent views of a histogram used by the
// likelihood kernels. Building one costs O(support); evaluating the NLL for a
// candidate parameter vector then touches each distinct count once.
struct NllWorkspace {
  std::vector<std::int64_t> support;  // distinct observed k, ascending
  std::vector<double> freq;           // matching frequencies
  std::int64_t total_n = 0;

  // Deduplicated union of {k-1, k} over the support, ascending; mixture-family
  // log-CCDFs are evaluated once per entry instead of twice per count.
  std::vector<double> ccdf_args;
  std::vector<std::size_t> idx_prev;  // position of k-1 in ccdf_args
  std::vector<std::size_t> idx_cur;   // position of k   in ccdf_args
  std::vector<double> log_k;          // log(k), for the power-law kernel
};

NllWorkspace make_workspace(const Histogram& h);

// The serial and parallel kernels are bitwise-identical by construction: the
// map step fills per-element slots (OpenMP or not) and the reduction is always
// the same serial compensated sum in index order.
namespace serial {
void log_pmf_grid(const ModelSpec& m, const NllWorkspace& w, std::vector<double>& out);
double negative_loglik(const ModelSpec& m, const NllWorkspace& w);
}  // namespace serial

namespace parallel {
void log_pmf_grid(const ModelSpec& m, const NllWorkspace& w, std::vector<double>& out);
double negative_loglik(const ModelSpec& m, const NllWorkspace& w);
}  // namespace parallel

// Shared deterministic reduction: -sum freq * logp, compensated, in support
// order. Throws when some logp is -inf, naming the offending count.
double nll_reduce(const NllWorkspace& w, const std::vector<double>& log_pmf);

}  // namespace citefit

#endif
