// Command-line front end: ingest counts, fit mixture models, emit curves,
// sample synthetic data, and cross-check closed forms against quadrature.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "citefit/dist_core.hpp"
#include "citefit/fit.hpp"
#include "citefit/gof.hpp"
#include "citefit/histogram.hpp"
#include "citefit/io.hpp"
#include "citefit/mix_oracle.hpp"
#include "citefit/sampler.hpp"

namespace {

using namespace citefit;

// Exit code 1: the run completed but a statistical check failed.
struct StatFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CountsFormat parse_format(const std::string& s) {
  if (s == "raw") return CountsFormat::raw;
  if (s == "hist") return CountsFormat::hist;
  throw ParseError("unknown format \"" + s + "\" (expected raw or hist)");
}

std::vector<int> parse_m(const std::string& s) {
  if (s == "sweep") return {1, 2, 3};
  if (s == "1" || s == "2" || s == "3") return {s[0] - '0'};
  throw ParseError("--m must be 1, 2, 3, or sweep");
}

struct FitArgs {
  std::string input, format = "raw", family = "we", m = "sweep", out;
  int k_shift = 1;
  std::uint64_t seed = 1;
  int restarts = 20;
  double alpha = 0.1, min_expected = 5.0;
  bool json = false;
};

int run_fit(const FitArgs& a) {
  const Histogram h = ingest_file(a.input, parse_format(a.format), a.k_shift);
  FitConfig cfg;
  cfg.n_restarts = a.restarts;
  cfg.m_values = parse_m(a.m);
  cfg.k_shift = a.k_shift;
  RngStream rng(a.seed);
  const ModelFamily family = family_from_name(a.family);
  const SweepResult sw = sweep_and_select(family, h, cfg, rng);

  for (const auto& item : sw.items) {
    if (!item.ok) {
      std::fprintf(stderr, "M=%d failed: %s\n", item.m, item.error.c_str());
    }
  }
  if (sw.selected < 0) throw StatFailure("no component count produced a converged fit");

  FitResult best = sw.items[static_cast<std::size_t>(sw.selected)].fit;
  std::string chi2_note;
  try {
    const BinnedTest t = chi2_test(best.model, h, a.min_expected, a.alpha);
    best.chi2 = t.statistic;
    best.dof = t.dof;
    best.p_value = t.p_value;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "chi2 = %.6g, dof = %d, p = %.6g -> %s at alpha = %g",
                  t.statistic, t.dof, t.p_value, t.reject ? "rejected" : "not rejected", a.alpha);
    chi2_note = buf;
  } catch (const std::runtime_error& e) {
    chi2_note = e.what();
  }

  const std::string doc = fit_result_to_json(best);
  if (!a.out.empty()) write_text_file(a.out, doc);
  if (a.json) {
    std::fputs(doc.c_str(), stdout);
  } else {
    std::printf("n = %lld distinct counts = %zu (k_shift = %d, raw zeros = %lld)\n",
                static_cast<long long>(h.total_n), h.bins.size(), a.k_shift,
                static_cast<long long>(h.n_raw_zeros));
    std::printf("selected %s M=%d: loglik = %.10g, aic = %.10g\n", a.family.c_str(),
                n_components(best.model), best.loglik, best.aic);
    std::printf("%s\n", chi2_note.c_str());
  }

  std::vector<FitResult> usable;
  for (const auto& item : sw.items) {
    if (item.ok) usable.push_back(item.fit);
  }
  if (usable.size() >= 2 && !a.json) {
    const auto rows = compare_models(usable, h, a.min_expected, a.alpha);
    std::fputs(comparison_to_csv(rows).c_str(), stdout);
  }
  return 0;
}

struct CurveArgs {
  std::string input, data, format = "raw", out_dir = ".";
  int k_shift = 1;
  std::int64_t k_max = 10000;
  double tau_min = 1e-2, tau_max = 1e3;
  int tau_points = 200;
};

int run_curves(const CurveArgs& a) {
  const ModelSpec m = model_from_json(read_text_file(a.input));
  if (a.k_max < 1) throw ParseError("--k-max must be >= 1");
  if (!(a.tau_min > 0.0) || !(a.tau_max > a.tau_min) || a.tau_points < 2) {
    throw ParseError("continuous grid needs 0 < tau-min < tau-max and >= 2 points");
  }

  CurveSeries pmf, ccdf;
  for (std::int64_t k = 1; k <= a.k_max; ++k) {
    pmf.x.push_back(static_cast<double>(k));
    pmf.y.push_back(model_pmf(m, k));
    ccdf.x.push_back(static_cast<double>(k));
    ccdf.y.push_back(model_ccdf(m, k - 1));  // Pr[K >= k]
  }
  const std::string dir = a.out_dir + "/";
  write_curve_csv(dir + "pmf.csv", pmf, "k", "pmf");
  write_curve_csv(dir + "ccdf.csv", ccdf, "k", "ccdf");

  if (!a.data.empty()) {
    const Histogram h = ingest_file(a.data, parse_format(a.format), a.k_shift);
    write_curve_csv(dir + "empirical_ccdf.csv", empirical_ccdf(h), "k", "ccdf");
  }

  if (const auto* we = std::get_if<WEMixtureParams>(&m)) {
    std::vector<double> taus(static_cast<std::size_t>(a.tau_points));
    const double step = std::log(a.tau_max / a.tau_min) / (a.tau_points - 1);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      taus[i] = a.tau_min * std::exp(step * static_cast<double>(i));
    }
    std::vector<std::string> names;
    std::vector<CurveSeries> pdfs, hazards;
    for (std::size_t ci = 0; ci < we->components.size(); ++ci) {
      const WaldParams wp = we->components[ci].wald;
      names.push_back("component_" + std::to_string(ci + 1));
      CurveSeries pdf;
      pdf.x = taus;
      for (double t : taus) pdf.y.push_back(wald_pdf(t, wp));
      pdfs.push_back(std::move(pdf));
      hazards.push_back(hazard(ContinuousModel{WaldModel{wp}}, taus));
    }
    write_table_csv(dir + "wald_pdf.csv", "tau", taus, names, pdfs);
    write_table_csv(dir + "hazard.csv", "tau", taus, names, hazards);
  }
  return 0;
}

struct SampleArgs {
  std::string input, out;
  std::int64_t n = 10000;
  std::uint64_t seed = 1;
  int k_shift = 1;
};

int run_sample(const SampleArgs& a) {
  if (a.n < 0) throw ParseError("--n must be >= 0");
  const ModelSpec m = model_from_json(read_text_file(a.input));
  RngStream rng(a.seed);
  const auto ks = sample_counts(m, a.n, rng);
  write_samples(a.out, ks, a.k_shift);
  return 0;
}

// Closed-form pmf vs the quadrature mix, across parameter cells spanning
// tight and heavy-tailed mixing densities.
int run_oracle_check(bool corrupt) {
  const std::vector<std::int64_t> ks{1, 2, 5, 10, 100, 1000};
  const QuadratureConfig qcfg;
  double worst = 0.0;
  int failures = 0;

  const auto report = [&](const char* label, double err) {
    std::printf("%-40s max rel err %.3e\n", label, err);
    worst = std::max(worst, err);
  };
  // A deliberately wrong closed form (negative-control hook for tests).
  const double fudge = corrupt ? 1.0 + 2e-6 : 1.0;

  const std::vector<WaldParams> wald_grid{
      {15.66, 8.92}, {11.72, 0.64}, {2.0, 3.0}, {0.5, 0.1}, {50.0, 50.0}};
  for (const auto& wp : wald_grid) {
    double err = 0.0;
    try {
      for (std::int64_t k : ks) {
        const WEMixtureParams one{{{1.0, wp}}};
        const double closed = we_pmf(k, one) * fudge;
        const double mixed = mixed_pmf(k, rig_density(wp), qcfg);
        err = std::max(err, std::abs(closed - mixed) / mixed);
      }
    } catch (const OracleError& e) {
      std::printf("wald mu=%g lambda=%g: quadrature failure: %s\n", wp.mu, wp.lambda, e.what());
      ++failures;
      continue;
    }
    char label[64];
    std::snprintf(label, sizeof(label), "we mu=%g lambda=%g", wp.mu, wp.lambda);
    report(label, err);
  }

  const std::vector<LomaxComponent> lomax_grid{
      {1.0, 1.5, 2.0}, {1.0, 0.3, 0.7}, {1.0, 3.0, 1.0}};
  for (const auto& lc : lomax_grid) {
    double err = 0.0;
    try {
      for (std::int64_t k : ks) {
        const double closed = lomax_pmf(k, LomaxMixtureParams{{lc}}) * fudge;
        const double mixed = mixed_pmf(k, gamma_density(lc.v, lc.b), qcfg);
        err = std::max(err, std::abs(closed - mixed) / mixed);
      }
    } catch (const OracleError& e) {
      std::printf("lomax b=%g v=%g: quadrature failure: %s\n", lc.b, lc.v, e.what());
      ++failures;
      continue;
    }
    char label[64];
    std::snprintf(label, sizeof(label), "lomax b=%g v=%g", lc.b, lc.v);
    report(label, err);
  }

  for (double beta : {0.1, 1.0}) {
    double err = 0.0;
    for (std::int64_t k : ks) {
      const double closed = maxent_pmf(k, MaxEntParams{beta}) * fudge;
      const double mixed = mixed_pmf(k, spike_density(beta), qcfg);
      err = std::max(err, std::abs(closed - mixed) / std::max(mixed, 1e-300));
    }
    char label[64];
    std::snprintf(label, sizeof(label), "spike beta=%g vs maxent", beta);
    report(label, err);
  }

  std::printf("overall max relative error %.3e (tolerance 1e-06)\n", worst);
  if (failures > 0 || worst > 1e-6) {
    throw StatFailure("closed forms and quadrature mix disagree");
  }
  return 0;
}

struct CompareArgs {
  std::string input, format = "raw", out;
  std::vector<std::string> fits;
  int k_shift = 1;
  double alpha = 0.1, min_expected = 5.0;
  bool json = false;
};

int run_compare(const CompareArgs& a) {
  const Histogram h = ingest_file(a.input, parse_format(a.format), a.k_shift);
  std::vector<FitResult> fits;
  for (const auto& path : a.fits) fits.push_back(fit_result_from_json(read_text_file(path)));
  const auto rows = compare_models(fits, h, a.min_expected, a.alpha);
  const std::string text = a.json ? comparison_to_json(rows) : comparison_to_csv(rows);
  std::fputs(text.c_str(), stdout);
  if (!a.out.empty()) write_text_file(a.out, comparison_to_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavy-tailed citation-count model toolkit"};
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit a mixture model and test it");
  fit->add_option("--input", fa.input, "counts file")->required();
  fit->add_option("--format", fa.format, "raw|hist");
  fit->add_option("--family", fa.family, "we|lomax|powerlaw");
  fit->add_option("--m", fa.m, "1|2|3|sweep");
  fit->add_option("--k-shift", fa.k_shift, "offset added to raw counts");
  fit->add_option("--seed", fa.seed, "rng seed");
  fit->add_option("--restarts", fa.restarts, "optimizer restarts");
  fit->add_option("--alpha", fa.alpha, "test significance level");
  fit->add_option("--min-expected", fa.min_expected, "minimum expected count per bin");
  fit->add_option("--out", fa.out, "write the fit JSON here");
  fit->add_flag("--json", fa.json, "print JSON instead of a summary");

  CurveArgs ca;
  auto* curves = app.add_subcommand("curves", "emit model and data curves as CSV");
  curves->add_option("--input", ca.input, "fit or model JSON")->required();
  curves->add_option("--data", ca.data, "counts file for the empirical curve");
  curves->add_option("--format", ca.format, "raw|hist");
  curves->add_option("--k-shift", ca.k_shift, "offset added to raw counts");
  curves->add_option("--out", ca.out_dir, "output directory");
  curves->add_option("--k-max", ca.k_max, "largest count in the discrete grid");
  curves->add_option("--tau-min", ca.tau_min, "processing-time grid start");
  curves->add_option("--tau-max", ca.tau_max, "processing-time grid end");
  curves->add_option("--tau-points", ca.tau_points, "processing-time grid size");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "draw synthetic counts from a model");
  sample->add_option("--input", sa.input, "fit or model JSON")->required();
  sample->add_option("--n", sa.n, "number of draws");
  sample->add_option("--seed", sa.seed, "rng seed");
  sample->add_option("--k-shift", sa.k_shift, "offset removed when writing raw counts");
  sample->add_option("--out", sa.out, "output counts file")->required();

  bool corrupt = false;
  auto* oracle = app.add_subcommand("oracle-check", "closed forms vs quadrature mixes");
  oracle->add_flag("--corrupt", corrupt, "negative control: perturb the closed form")
      ->group("");

  CompareArgs cp;
  auto* compare = app.add_subcommand("compare", "rank saved fits on a dataset by AIC");
  compare->add_option("--input", cp.input, "counts file")->required();
  compare->add_option("--format", cp.format, "raw|hist");
  compare->add_option("--k-shift", cp.k_shift, "offset added to raw counts");
  compare->add_option("--fits", cp.fits, "fit JSON files")->required()->expected(-2);
  compare->add_option("--alpha", cp.alpha, "test significance level");
  compare->add_option("--min-expected", cp.min_expected, "minimum expected count per bin");
  compare->add_option("--out", cp.out, "write the comparison CSV here");
  compare->add_flag("--json", cp.json, "print JSON instead of CSV");

  try {
    app.parse(argc, argv);
    if (*fit) return run_fit(fa);
    if (*curves) return run_curves(ca);
    if (*sample) return run_sample(sa);
    if (*oracle) return run_oracle_check(corrupt);
    if (*compare) return run_compare(cp);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const StatFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
