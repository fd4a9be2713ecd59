#include "citefit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "citefit/batch.hpp"

namespace citefit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWeightFloor = 1e-6;

void check_config(const FitConfig& cfg) {
  if (cfg.n_restarts < 1) throw std::invalid_argument("fit: n_restarts must be >= 1");
  if (cfg.max_iterations < 1) throw std::invalid_argument("fit: max_iterations must be >= 1");
  if (!(cfg.simplex_tolerance > 0.0)) {
    throw std::invalid_argument("fit: simplex_tolerance must be positive");
  }
}

void append_weight_tail(const std::vector<double>& w, std::vector<double>& theta) {
  const std::size_t m = w.size();
  if (m == 1) return;
  const double denom = 1.0 - static_cast<double>(m) * kWeightFloor;
  std::vector<double> wp(m);
  for (std::size_t i = 0; i < m; ++i) {
    wp[i] = std::max((w[i] - kWeightFloor) / denom, 1e-300);
  }
  for (std::size_t i = 0; i + 1 < m; ++i) theta.push_back(std::log(wp[i] / wp[m - 1]));
}

std::vector<double> weights_from_tail(int m, const double* tail) {
  if (m == 1) return {1.0};
  std::vector<double> e(static_cast<std::size_t>(m), 1.0);
  for (int i = 0; i + 1 < m; ++i) e[static_cast<std::size_t>(i)] = std::exp(tail[i]);
  const double s = std::accumulate(e.begin(), e.end(), 0.0);
  const double denom = 1.0 - static_cast<double>(m) * kWeightFloor;
  std::vector<double> w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    w[static_cast<std::size_t>(i)] = kWeightFloor + denom * (e[static_cast<std::size_t>(i)] / s);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Nelder-Mead with standard coefficients (reflect 1, expand 2, contract 0.5,
// shrink 0.5). Convergence: vertex value spread <= tol * (|f_best| + 1).

struct NmOutcome {
  std::vector<double> x;
  double f = kInf;
  bool converged = false;
};

template <typename Fn>
NmOutcome nelder_mead(const Fn& fn, const std::vector<double>& x0, double step, double tol,
                      int max_iter) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> pts(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += step;
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = fn(pts[i]);

  std::vector<std::size_t> ord(d + 1);
  NmOutcome out;
  for (int it = 0; it < max_iter; ++it) {
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t ib = ord.front(), iw = ord.back(), is = ord[d - 1];
    if (fv[iw] - fv[ib] <= tol * (std::abs(fv[ib]) + 1.0)) {
      out.x = pts[ib];
      out.f = fv[ib];
      out.converged = true;
      return out;
    }

    std::vector<double> cen(d, 0.0);
    for (std::size_t j = 0; j <= d; ++j) {
      if (j == iw) continue;
      for (std::size_t i = 0; i < d; ++i) cen[i] += pts[j][i];
    }
    for (double& c : cen) c /= static_cast<double>(d);

    std::vector<double> xr(d);
    for (std::size_t i = 0; i < d; ++i) xr[i] = cen[i] + (cen[i] - pts[iw][i]);
    const double fr = fn(xr);

    if (fr < fv[ib]) {
      std::vector<double> xe(d);
      for (std::size_t i = 0; i < d; ++i) xe[i] = cen[i] + 2.0 * (cen[i] - pts[iw][i]);
      const double fe = fn(xe);
      if (fe < fr) {
        pts[iw] = std::move(xe);
        fv[iw] = fe;
      } else {
        pts[iw] = std::move(xr);
        fv[iw] = fr;
      }
      continue;
    }
    if (fr < fv[is]) {
      pts[iw] = std::move(xr);
      fv[iw] = fr;
      continue;
    }

    std::vector<double> xc(d);
    bool accept = false;
    double fc = kInf;
    if (fr < fv[iw]) {
      for (std::size_t i = 0; i < d; ++i) xc[i] = cen[i] + 0.5 * (xr[i] - cen[i]);
      fc = fn(xc);
      accept = fc <= fr;
    } else {
      for (std::size_t i = 0; i < d; ++i) xc[i] = cen[i] + 0.5 * (pts[iw][i] - cen[i]);
      fc = fn(xc);
      accept = fc < fv[iw];
    }
    if (accept) {
      pts[iw] = std::move(xc);
      fv[iw] = fc;
      continue;
    }

    for (std::size_t j = 0; j <= d; ++j) {
      if (j == ib) continue;
      for (std::size_t i = 0; i < d; ++i) pts[j][i] = pts[ib][i] + 0.5 * (pts[j][i] - pts[ib][i]);
      fv[j] = fn(pts[j]);
    }
  }

  const std::size_t ib = static_cast<std::size_t>(
      std::min_element(fv.begin(), fv.end()) - fv.begin());
  out.x = pts[ib];
  out.f = fv[ib];
  out.converged = false;
  return out;
}

// ---------------------------------------------------------------------------
// Method-of-moments style starting point: split the sample into M quantile
// bands and seed one component per band.

struct BandStats {
  double mass = 0.0;
  double mean = 0.0;
  double var = 0.0;
};

std::vector<BandStats> quantile_bands(const Histogram& h, int m) {
  const double n = static_cast<double>(h.total_n);
  double mean_all = 0.0, sq_all = 0.0;
  for (const auto& [k, c] : h.bins) {
    mean_all += static_cast<double>(c) * static_cast<double>(k);
    sq_all += static_cast<double>(c) * static_cast<double>(k) * static_cast<double>(k);
  }
  mean_all /= n;
  const double var_all = std::max(sq_all / n - mean_all * mean_all, 0.25);

  std::vector<double> cnt(static_cast<std::size_t>(m), 0.0);
  std::vector<double> s1(static_cast<std::size_t>(m), 0.0);
  std::vector<double> s2(static_cast<std::size_t>(m), 0.0);
  double cum = 0.0;
  for (const auto& [k, c] : h.bins) {
    const double fc = static_cast<double>(c);
    const double mid = cum + 0.5 * fc;
    auto band = static_cast<std::size_t>(
        std::min<double>(m - 1, std::floor(static_cast<double>(m) * mid / n)));
    cnt[band] += fc;
    s1[band] += fc * static_cast<double>(k);
    s2[band] += fc * static_cast<double>(k) * static_cast<double>(k);
    cum += fc;
  }

  std::vector<BandStats> bands(static_cast<std::size_t>(m));
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (cnt[b] <= 0.0) {
      bands[b] = {1e-3, mean_all * (0.5 + static_cast<double>(b)), var_all};
      continue;
    }
    const double mu = s1[b] / cnt[b];
    bands[b] = {cnt[b] / n, mu, std::max(s2[b] / cnt[b] - mu * mu, 0.25)};
  }
  double mass = 0.0;
  for (const auto& b : bands) mass += b.mass;
  for (auto& b : bands) b.mass = std::max(b.mass / mass, 1e-3);
  mass = 0.0;
  for (const auto& b : bands) mass += b.mass;
  for (auto& b : bands) b.mass /= mass;
  return bands;
}

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

ModelSpec mom_seed(ModelFamily family, int m, const Histogram& h, int k_shift) {
  const auto bands = quantile_bands(h, m);
  std::vector<double> w(bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i) w[i] = bands[i].mass;

  if (family == ModelFamily::we) {
    WEMixtureParams p;
    for (std::size_t i = 0; i < bands.size(); ++i) {
      const double mu = std::max(bands[i].mean - static_cast<double>(k_shift), 0.5);
      const double la = clamp(mu * mu * mu / bands[i].var, 1e-2, 1e4);
      p.components.push_back({w[i], {mu, la}});
    }
    return p;
  }
  if (family == ModelFamily::lomax) {
    LomaxMixtureParams p;
    for (std::size_t i = 0; i < bands.size(); ++i) {
      p.components.push_back({w[i], std::max(bands[i].mean, 0.25), 1.5});
    }
    return p;
  }

  // Hill-style tail-index estimate seeds the power-law exponent.
  const double kmin = static_cast<double>(h.bins.begin()->first);
  double slog = 0.0;
  for (const auto& [k, c] : h.bins) {
    slog += static_cast<double>(c) * std::log(static_cast<double>(k) / (kmin - 0.5));
  }
  const double ghat = clamp(1.0 + static_cast<double>(h.total_n) / std::max(slog, 1e-9), 1.05, 5.0);
  PowerLawParams p;
  p.kmax = 0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const double spread =
        (m == 1) ? 1.0 : 0.7 + 0.6 * static_cast<double>(i) / static_cast<double>(m - 1);
    p.components.push_back({1.0 / static_cast<double>(m), clamp(ghat * spread, 1.05, 6.0)});
  }
  return p;
}

}  // namespace

namespace detail {

std::vector<double> encode_params(const ModelSpec& model) {
  validate_model(model);
  std::vector<double> theta;
  std::vector<double> w;

  if (const auto* we = std::get_if<WEMixtureParams>(&model)) {
    for (const auto& c : we->components) theta.push_back(std::log(c.wald.mu));
    for (const auto& c : we->components) theta.push_back(std::log(c.wald.lambda));
    for (const auto& c : we->components) w.push_back(c.c);
  } else if (const auto* lo = std::get_if<LomaxMixtureParams>(&model)) {
    for (const auto& c : lo->components) theta.push_back(std::log(c.b));
    for (const auto& c : lo->components) theta.push_back(std::log(c.v));
    for (const auto& c : lo->components) w.push_back(c.c);
  } else {
    const auto& pl = std::get<PowerLawParams>(model);
    if (pl.kmax > 0) {
      throw std::invalid_argument("encode_params: bounded power laws are not fittable");
    }
    for (const auto& c : pl.components) theta.push_back(std::log(c.gamma - 1.0));
    for (const auto& c : pl.components) w.push_back(c.c);
  }
  append_weight_tail(w, theta);
  return theta;
}

ModelSpec decode_params(ModelFamily family, int m, const std::vector<double>& theta) {
  if (m < 1 || m > 3) throw std::invalid_argument("decode_params: M must be in 1..3");
  const std::size_t um = static_cast<std::size_t>(m);
  const std::size_t want =
      (family == ModelFamily::powerlaw ? um : 2 * um) + (um - 1);
  if (theta.size() != want) throw std::invalid_argument("decode_params: wrong vector length");

  if (family == ModelFamily::powerlaw) {
    const auto w = weights_from_tail(m, theta.data() + um);
    PowerLawParams p;
    p.kmax = 0;
    for (std::size_t i = 0; i < um; ++i) p.components.push_back({w[i], 1.0 + std::exp(theta[i])});
    return p;
  }
  const auto w = weights_from_tail(m, theta.data() + 2 * um);
  if (family == ModelFamily::we) {
    WEMixtureParams p;
    for (std::size_t i = 0; i < um; ++i) {
      p.components.push_back({w[i], {std::exp(theta[i]), std::exp(theta[um + i])}});
    }
    return p;
  }
  LomaxMixtureParams p;
  for (std::size_t i = 0; i < um; ++i) {
    p.components.push_back({w[i], std::exp(theta[i]), std::exp(theta[um + i])});
  }
  return p;
}

}  // namespace detail

double negative_loglik(const ModelSpec& model, const Histogram& h) {
  const NllWorkspace ws = make_workspace(h);
  return serial::negative_loglik(model, ws);
}

FitResult fit_mle(ModelFamily family, int m, const Histogram& h, const FitConfig& cfg,
                  RngStream& rng) {
  check_config(cfg);
  if (m < 1 || m > 3) throw std::invalid_argument("fit_mle: M must be in 1..3");
  if (h.bins.empty()) throw std::invalid_argument("fit_mle: histogram is empty");
  const std::size_t need = 2 * (3 * static_cast<std::size_t>(m) - 1);
  if (h.bins.size() < need) {
    throw std::invalid_argument("fit_mle: too few distinct counts for this component number");
  }

  const NllWorkspace ws = make_workspace(h);
  const auto objective = [&](const std::vector<double>& th) -> double {
    try {
      const ModelSpec mdl = detail::decode_params(family, m, th);
      const double v = parallel::negative_loglik(mdl, ws);
      return std::isfinite(v) ? v : kInf;
    } catch (const std::exception&) {
      return kInf;
    }
  };

  const std::uint64_t sub_base = rng.next_u64();
  const std::vector<double> theta0 = detail::encode_params(mom_seed(family, m, h, cfg.k_shift));

  bool have_any = false, have_conv = false;
  double best_f = kInf, best_conv_f = kInf;
  std::vector<double> best_x, best_conv_x;
  int best_r = 0, best_conv_r = 0, n_converged = 0;

  for (int r = 0; r < cfg.n_restarts; ++r) {
    RngStream rr(derive_seed(sub_base, r));
    // Early restarts probe near the moment seed, later tiers range wider; the
    // widest tier is what escapes collapsed-component basins, whose log-scale
    // parameters can sit several units away from the seed.
    const double sd = (r <= 7) ? 0.5 : (r <= 14) ? 1.5 : 3.0;
    std::vector<double> theta = theta0;
    if (r > 0) {
      for (double& t : theta) t += sd * rr.normal();
    }
    int attempt = 0;
    while (!std::isfinite(objective(theta)) && attempt < 8) {
      theta = theta0;
      for (double& t : theta) t += sd * rr.normal();
      ++attempt;
    }
    if (!std::isfinite(objective(theta))) continue;

    NmOutcome run = nelder_mead(objective, theta, 0.3, cfg.simplex_tolerance, cfg.max_iterations);
    for (int polish = 0; polish < 2; ++polish) {
      run = nelder_mead(objective, run.x, 0.06, cfg.simplex_tolerance, cfg.max_iterations);
    }

    if (!have_any || run.f < best_f) {
      have_any = true;
      best_f = run.f;
      best_x = run.x;
      best_r = r;
    }
    if (run.converged) {
      ++n_converged;
      if (!have_conv || run.f < best_conv_f) {
        have_conv = true;
        best_conv_f = run.f;
        best_conv_x = run.x;
        best_conv_r = r;
      }
    }
  }

  FitResult res;
  res.seed = sub_base;
  res.n_obs = h.total_n;
  res.k_shift = cfg.k_shift;
  res.n_restarts_used = n_converged;
  res.converged = have_conv;

  const std::vector<double>* px = have_conv ? &best_conv_x : (have_any ? &best_x : nullptr);
  const double f = have_conv ? best_conv_f : best_f;
  const int rbest = have_conv ? best_conv_r : best_r;
  if (px == nullptr) {
    res.model = canonical_model(mom_seed(family, m, h, cfg.k_shift));
    res.n_free_params = n_free_params(res.model);
    res.best_restart_seed = derive_seed(sub_base, 0);
    return res;
  }
  res.model = canonical_model(detail::decode_params(family, m, *px));
  res.loglik = -f;
  res.n_free_params = n_free_params(res.model);
  res.aic = -2.0 * res.loglik + 2.0 * static_cast<double>(res.n_free_params);
  res.best_restart_seed = derive_seed(sub_base, rbest);
  return res;
}

SweepResult sweep_and_select(ModelFamily family, const Histogram& h, const FitConfig& cfg,
                             RngStream& rng) {
  check_config(cfg);
  if (cfg.m_values.empty()) throw std::invalid_argument("sweep: m_values is empty");
  for (int m : cfg.m_values) {
    if (m < 1 || m > 3) throw std::invalid_argument("sweep: m_values entries must be in 1..3");
  }

  SweepResult sw;
  for (int m : cfg.m_values) {
    SweepItem item;
    item.m = m;
    try {
      item.fit = fit_mle(family, m, h, cfg, rng);
      item.has_fit = true;
      item.ok = item.fit.converged;
      if (!item.ok) item.error = "no restart converged";
    } catch (const std::exception& e) {
      item.error = e.what();
    }
    sw.items.push_back(std::move(item));
  }

  double best_aic = kInf;
  int best_m = 0;
  for (std::size_t i = 0; i < sw.items.size(); ++i) {
    const auto& it = sw.items[i];
    if (!it.ok) continue;
    const double a = it.fit.aic;
    if (sw.selected < 0 || a < best_aic || (a == best_aic && it.m < best_m)) {
      sw.selected = static_cast<int>(i);
      best_aic = a;
      best_m = it.m;
    }
  }
  return sw;
}

}  // namespace citefit
