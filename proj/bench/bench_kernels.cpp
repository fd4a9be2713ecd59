// Times the serial and OpenMP likelihood kernels on a dense synthetic
// histogram and verifies they agree bitwise. Not part of the test suite; run
// it by hand when touching the batch code paths.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "citefit/batch.hpp"
#include "citefit/dist_core.hpp"
#include "citefit/histogram.hpp"

using namespace citefit;

namespace {

using Clock = std::chrono::steady_clock;

double ms_per_eval(double (*kernel)(const ModelSpec&, const NllWorkspace&), const ModelSpec& m,
                   const NllWorkspace& w, int reps) {
  kernel(m, w);  // warm up caches and page in the workspace
  const auto t0 = Clock::now();
  double sink = 0.0;
  for (int r = 0; r < reps; ++r) sink += kernel(m, w);
  const double dt = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  static volatile double observed;
  observed = sink;  // keep the evaluations observable
  static_cast<void>(observed);
  return dt / reps;
}

}  // namespace

int main() {
  Histogram h;
  for (std::int64_t k = 1; k <= 200000; ++k) h.add(k, 1 + (k % 7));
  const NllWorkspace w = make_workspace(h);

  const ModelSpec models[] = {
      WEMixtureParams{{{0.5, {15.66, 8.92}}, {0.3, {11.72, 0.64}}, {0.2, {3.0, 2.0}}}},
      LomaxMixtureParams{{{0.5, 1.5, 2.0}, {0.3, 0.3, 0.7}, {0.2, 4.0, 1.2}}},
      PowerLawParams{{{0.5, 2.5}, {0.3, 1.8}, {0.2, 3.5}}, 0},
  };
  const char* names[] = {"we M=3", "lomax M=3", "powerlaw M=3"};
  const int reps = 20;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("support: %zu distinct counts, %lld observations\n\n", w.support.size(),
              static_cast<long long>(w.total_n));
  std::printf("%-14s %12s %12s %9s  %s\n", "kernel", "serial ms", "parallel ms", "speedup",
              "agreement");

  for (int i = 0; i < 3; ++i) {
    const double s = ms_per_eval(serial::negative_loglik, models[i], w, reps);
    const double p = ms_per_eval(parallel::negative_loglik, models[i], w, reps);

    const double a = serial::negative_loglik(models[i], w);
    const double b = parallel::negative_loglik(models[i], w);
    const bool same = std::memcmp(&a, &b, sizeof a) == 0;

    std::printf("%-14s %12.3f %12.3f %8.2fx  %s\n", names[i], s, p, s / p,
                same ? "bitwise" : "DIVERGED");
    if (!same) return 1;
  }
  return 0;
}
