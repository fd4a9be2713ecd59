#include "citefit/batch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "citefit/kahan.hpp"
#include "citefit/special.hpp"

namespace citefit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

NllWorkspace make_workspace(const Histogram& h) {
  if (h.bins.empty()) throw std::invalid_argument("nll workspace: histogram is empty");
  NllWorkspace w;
  w.support.reserve(h.bins.size());
  w.freq.reserve(h.bins.size());
  for (const auto& [k, n] : h.bins) {
    w.support.push_back(k);
    w.freq.push_back(static_cast<double>(n));
    w.total_n += n;
  }

  w.ccdf_args.reserve(2 * w.support.size());
  for (std::int64_t k : w.support) {
    w.ccdf_args.push_back(static_cast<double>(k - 1));
    w.ccdf_args.push_back(static_cast<double>(k));
  }
  std::sort(w.ccdf_args.begin(), w.ccdf_args.end());
  w.ccdf_args.erase(std::unique(w.ccdf_args.begin(), w.ccdf_args.end()), w.ccdf_args.end());

  w.idx_prev.reserve(w.support.size());
  w.idx_cur.reserve(w.support.size());
  w.log_k.reserve(w.support.size());
  for (std::int64_t k : w.support) {
    const auto at = [&](double v) {
      return static_cast<std::size_t>(
          std::lower_bound(w.ccdf_args.begin(), w.ccdf_args.end(), v) - w.ccdf_args.begin());
    };
    w.idx_prev.push_back(at(static_cast<double>(k - 1)));
    w.idx_cur.push_back(at(static_cast<double>(k)));
    w.log_k.push_back(std::log(static_cast<double>(k)));
  }
  return w;
}

namespace {

// The one numeric code path; Exec decides whether the index loop is the plain
// serial reference or the OpenMP kernel. Identical slot-filling either way, so
// the two are bitwise-equal by construction.
struct SerialExec {
  template <typename Fn>
  void operator()(std::size_t n, Fn&& fn) const {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
};

struct OmpExec {
  template <typename Fn>
  void operator()(std::size_t n, Fn&& fn) const {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
  }
};

// log of sum_i exp(term_i) over a small fixed component count.
double combine(const double* terms, std::size_t m) {
  double best = -kInf;
  for (std::size_t i = 0; i < m; ++i) best = std::max(best, terms[i]);
  if (best == -kInf) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += std::exp(terms[i] - best);
  return best + std::log(s);
}

template <typename Exec>
void grid_impl(const ModelSpec& m, const NllWorkspace& w, std::vector<double>& out,
               const Exec& exec) {
  validate_model(m);
  out.assign(w.support.size(), 0.0);

  if (const auto* we = std::get_if<WEMixtureParams>(&m)) {
    const std::size_t M = we->components.size();
    std::vector<double> lcc(M * w.ccdf_args.size());
    for (std::size_t c = 0; c < M; ++c) {
      const WaldParams wp = we->components[c].wald;
      double* row = lcc.data() + c * w.ccdf_args.size();
      exec(w.ccdf_args.size(), [&, row](std::size_t j) { row[j] = we_log_ccdf(w.ccdf_args[j], wp); });
    }
    std::vector<double> logw(M);
    for (std::size_t c = 0; c < M; ++c) logw[c] = std::log(we->components[c].c);
    exec(w.support.size(), [&](std::size_t i) {
      double terms[3];
      for (std::size_t c = 0; c < M; ++c) {
        const double* row = lcc.data() + c * w.ccdf_args.size();
        terms[c] = logw[c] + log_diff_exp(row[w.idx_prev[i]], row[w.idx_cur[i]]);
      }
      out[i] = combine(terms, M);
    });
    return;
  }

  if (const auto* lo = std::get_if<LomaxMixtureParams>(&m)) {
    const std::size_t M = lo->components.size();
    std::vector<double> lcc(M * w.ccdf_args.size());
    for (std::size_t c = 0; c < M; ++c) {
      const LomaxComponent lc = lo->components[c];
      double* row = lcc.data() + c * w.ccdf_args.size();
      exec(w.ccdf_args.size(),
           [&, lc, row](std::size_t j) { row[j] = -lc.v * std::log1p(w.ccdf_args[j] / lc.b); });
    }
    std::vector<double> logw(M);
    for (std::size_t c = 0; c < M; ++c) logw[c] = std::log(lo->components[c].c);
    exec(w.support.size(), [&](std::size_t i) {
      double terms[3];
      for (std::size_t c = 0; c < M; ++c) {
        const double* row = lcc.data() + c * w.ccdf_args.size();
        terms[c] = logw[c] + log_diff_exp(row[w.idx_prev[i]], row[w.idx_cur[i]]);
      }
      out[i] = combine(terms, M);
    });
    return;
  }

  const auto& pl = std::get<PowerLawParams>(m);
  const std::size_t M = pl.components.size();
  double logw[3], logz[3], gam[3];
  for (std::size_t c = 0; c < M; ++c) {
    logw[c] = std::log(pl.components[c].c);
    gam[c] = pl.components[c].gamma;
    logz[c] = powerlaw_log_z(gam[c], pl.kmax);
  }
  exec(w.support.size(), [&](std::size_t i) {
    if (pl.kmax > 0 && w.support[i] > pl.kmax) {
      out[i] = -kInf;
      return;
    }
    double terms[3];
    for (std::size_t c = 0; c < M; ++c) terms[c] = logw[c] - gam[c] * w.log_k[i] - logz[c];
    out[i] = combine(terms, M);
  });
}

}  // namespace

double nll_reduce(const NllWorkspace& w, const std::vector<double>& log_pmf) {
  if (log_pmf.size() != w.support.size()) {
    throw std::invalid_argument("nll_reduce: grid size does not match support");
  }
  KahanSum acc;
  for (std::size_t i = 0; i < log_pmf.size(); ++i) {
    const double lp = log_pmf[i];
    if (!(lp > -kInf) || lp != lp) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "likelihood: pmf vanishes at observed count k = %lld",
                    static_cast<long long>(w.support[i]));
      throw std::runtime_error(msg);
    }
    acc.add(w.freq[i] * lp);
  }
  return -acc.value();
}

namespace serial {

void log_pmf_grid(const ModelSpec& m, const NllWorkspace& w, std::vector<double>& out) {
  grid_impl(m, w, out, SerialExec{});
}

double negative_loglik(const ModelSpec& m, const NllWorkspace& w) {
  std::vector<double> grid;
  log_pmf_grid(m, w, grid);
  return nll_reduce(w, grid);
}

}  // namespace serial

namespace parallel {

void log_pmf_grid(const ModelSpec& m, const NllWorkspace& w, std::vector<double>& out) {
  grid_impl(m, w, out, OmpExec{});
}

double negative_loglik(const ModelSpec& m, const NllWorkspace& w) {
  std::vector<double> grid;
  log_pmf_grid(m, w, grid);
  return nll_reduce(w, grid);
}

}  // namespace parallel

}  // namespace citefit
