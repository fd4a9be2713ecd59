#ifndef CITEFIT_SAMPLER_HPP
#define CITEFIT_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "citefit/dist_core.hpp"

namespace citefit {

// xoshiro256++ seeded through a splitmix64 chain. Small, fast, period 2^256-1;
// identical seeds give identical sequences on every platform with IEEE doubles.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on (0, 1]: never returns 0, so log(u) is always finite.
  double uniform01();
  // Standard normal via the polar method; caches the spare deviate.
  double normal();
  // Gamma(shape, 1) via Marsaglia-Tsang squeeze, with the shape < 1 boost.
  double gamma(double shape);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Deterministic substream derivation for restart i of a base seed.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

// One Wald (inverse Gaussian) draw: mean mu, variance mu^3/lambda.
double sample_wald(const WaldParams& p, RngStream& rng);

// Compound draws: pick a component by weight, draw its rate, then a geometric
// count on {1, 2, ...} with success probability 1 - e^(-beta).
std::int64_t sample_we_count(const WEMixtureParams& p, RngStream& rng);
std::int64_t sample_lomax_count(const LomaxMixtureParams& p, RngStream& rng);

// Power-law draws invert the CCDF: an explicit table below the direct-sum
// cutoff, closed-form tail bisection above it. Draws beyond 2^62 saturate
// there; for gamma >= 1.5 that tail holds less than 1e-9 of the mass.
class PowerLawSampler {
 public:
  explicit PowerLawSampler(const PowerLawParams& p);
  std::int64_t operator()(RngStream& rng) const;

 private:
  struct Component {
    double gamma;
    double log_z;
    std::vector<double> cdf_table;  // P(K <= k) for k = 1..table size
  };
  std::vector<Component> comps_;
  std::vector<double> weight_cdf_;
  std::int64_t kmax_;
};

std::int64_t sample_powerlaw_count(const PowerLawParams& p, RngStream& rng);

// Convenience for bulk generation through the model dispatch type.
std::vector<std::int64_t> sample_counts(const ModelSpec& m, std::int64_t n, RngStream& rng);

}  // namespace citefit

#endif
