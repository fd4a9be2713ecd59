#ifndef CITEFIT_HISTOGRAM_HPP
#define CITEFIT_HISTOGRAM_HPP

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>

namespace citefit {

// Sparse counts-of-counts: key k >= 1, value = observed frequency. Keys stay
// sorted, which the likelihood and binning code rely on.
struct Histogram {
  std::map<std::int64_t, std::int64_t> bins;
  std::int64_t total_n = 0;
  // Ingestion metadata: shift applied to raw citation counts and how many
  // raw zeros there were before shifting.
  std::int64_t k_shift = 0;
  std::int64_t n_raw_zeros = 0;

  void add(std::int64_t k, std::int64_t freq = 1) {
    if (k < 1) throw std::domain_error("histogram: keys must be >= 1");
    if (freq < 0) throw std::domain_error("histogram: frequencies must be >= 0");
    if (freq == 0) return;
    bins[k] += freq;
    total_n += freq;
  }
};

inline Histogram histogram_from_samples(std::span<const std::int64_t> ks) {
  Histogram h;
  for (std::int64_t k : ks) h.add(k);
  return h;
}

}  // namespace citefit

#endif
