#include "citefit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace citefit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  // splitmix64 cannot emit four consecutive zeros, so the xoshiro state is
  // always valid.
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() {
  // 53 uniform bits mapped to (0, 1]: the +1 excludes zero exactly.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma sampler: shape must be positive");
  if (shape < 1.0) {
    // Boost: X ~ Gamma(a+1), U^(1/a) scales it down to Gamma(a).
    const double x = gamma(shape + 1.0);
    return x * std::pow(uniform01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t sm = base_seed ^ (0xA0761D6478BD642FULL * (index + 1));
  return splitmix64(sm);
}

double sample_wald(const WaldParams& p, RngStream& rng) {
  validate_params(p);
  const double nu = rng.normal();
  const double y = nu * nu;
  const double x = p.mu + p.mu * p.mu * y / (2.0 * p.lambda) -
                   p.mu / (2.0 * p.lambda) *
                       std::sqrt(4.0 * p.mu * p.lambda * y + p.mu * p.mu * y * y);
  if (rng.uniform01() <= p.mu / (p.mu + x)) return x;
  return p.mu * p.mu / x;
}

namespace {

// Geometric on {1, 2, ...} with P(K > k) = e^(-k beta), by inverse transform.
std::int64_t geometric_count(double beta, RngStream& rng) {
  const double u = rng.uniform01();
  return 1 + static_cast<std::int64_t>(std::floor(-std::log(u) / beta));
}

template <typename Comp>
const Comp& pick_component(const std::vector<Comp>& comps, RngStream& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (const Comp& c : comps) {
    cum += c.c;
    if (u <= cum) return c;
  }
  return comps.back();  // u == 1 against a cumulative sum a hair under 1
}

}  // namespace

std::int64_t sample_we_count(const WEMixtureParams& p, RngStream& rng) {
  validate_params(p);
  const WEComponent& comp = pick_component(p.components, rng);
  const double tau = sample_wald(comp.wald, rng);
  return geometric_count(1.0 / tau, rng);
}

std::int64_t sample_lomax_count(const LomaxMixtureParams& p, RngStream& rng) {
  validate_params(p);
  const LomaxComponent& comp = pick_component(p.components, rng);
  const double beta = rng.gamma(comp.v) / comp.b;
  return geometric_count(beta, rng);
}

PowerLawSampler::PowerLawSampler(const PowerLawParams& p) : kmax_(p.kmax) {
  validate_params(p);
  constexpr std::int64_t kTableCap = 1 << 22;
  if (p.kmax > kTableCap) {
    throw std::invalid_argument("powerlaw sampler: finite kmax too large for table inversion");
  }
  const std::int64_t table_n = p.kmax > 0 ? p.kmax : 256;
  double wcum = 0.0;
  for (const PowerLawComponent& c : p.components) {
    Component comp;
    comp.gamma = c.gamma;
    comp.log_z = powerlaw_log_z(c.gamma, p.kmax);
    comp.cdf_table.reserve(table_n);
    const double inv_z = std::exp(-comp.log_z);
    double cum = 0.0;
    for (std::int64_t k = 1; k <= table_n; ++k) {
      cum += std::pow(static_cast<double>(k), -c.gamma) * inv_z;
      comp.cdf_table.push_back(cum);
    }
    comps_.push_back(std::move(comp));
    wcum += c.c;
    weight_cdf_.push_back(wcum);
  }
}

std::int64_t PowerLawSampler::operator()(RngStream& rng) const {
  const double uw = rng.uniform01();
  size_t ci = 0;
  while (ci + 1 < comps_.size() && uw > weight_cdf_[ci]) ++ci;
  const Component& c = comps_[ci];

  const double u = rng.uniform01();
  const auto& tab = c.cdf_table;
  if (u <= tab.back() || kmax_ > 0) {
    const auto it = std::lower_bound(tab.begin(), tab.end(), u);
    return 1 + static_cast<std::int64_t>(it - tab.begin()) -
           (it == tab.end() ? 1 : 0);  // u == 1 rounding guard on finite support
  }
  // Tail inversion on the closed-form survival: smallest k with P(K > k) < 1-u.
  // Every k probed here is past the table, where the tail formula is valid.
  const double target = 1.0 - u;  // may be 0; then we ride to the saturation cap
  const double inv_z = std::exp(-c.log_z);
  const double gamma = c.gamma;
  auto survival = [gamma, inv_z](std::int64_t k) {
    return powerlaw_tail_sum(static_cast<double>(k) + 1.0, gamma) * inv_z;
  };
  std::int64_t lo = static_cast<std::int64_t>(tab.size());  // survival(lo) >= target
  constexpr std::int64_t kCap = std::int64_t{1} << 62;
  std::int64_t hi = 2 * lo;
  while (survival(hi) >= target) {
    lo = hi;
    if (hi >= kCap) return kCap;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (survival(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::int64_t sample_powerlaw_count(const PowerLawParams& p, RngStream& rng) {
  return PowerLawSampler(p)(rng);
}

std::vector<std::int64_t> sample_counts(const ModelSpec& m, std::int64_t n, RngStream& rng) {
  if (n < 0) throw std::domain_error("sample_counts: n must be >= 0");
  std::vector<std::int64_t> out;
  out.reserve(static_cast<size_t>(n));
  if (const auto* we = std::get_if<WEMixtureParams>(&m)) {
    validate_params(*we);
    for (std::int64_t i = 0; i < n; ++i) out.push_back(sample_we_count(*we, rng));
  } else if (const auto* lo = std::get_if<LomaxMixtureParams>(&m)) {
    validate_params(*lo);
    for (std::int64_t i = 0; i < n; ++i) out.push_back(sample_lomax_count(*lo, rng));
  } else {
    const PowerLawSampler s(std::get<PowerLawParams>(m));
    for (std::int64_t i = 0; i < n; ++i) out.push_back(s(rng));
  }
  return out;
}

}  // namespace citefit
