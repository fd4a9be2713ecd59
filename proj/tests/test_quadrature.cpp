#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "citefit/quadrature.hpp"

using namespace citefit;

TEST_CASE("gk15 is exact on low-degree polynomials") {
  auto cubic = [](double x) { return 3.0 * x * x * x - x + 2.0; };
  auto [v, e] = gk15(cubic, -1.0, 2.0);
  // Antiderivative 3x^4/4 - x^2/2 + 2x evaluated on [-1, 2].
  CHECK(std::fabs(v - 15.75) < 1e-13);
  CHECK(e < 1e-12);
}

TEST_CASE("adaptive quadrature hits analytic values on smooth integrands") {
  const double bp_sin[] = {0.0, 1.0, M_PI};
  auto r = integrate_adaptive([](double x) { return std::sin(x); }, bp_sin, 1e-12, 1e-15, 100);
  CHECK(r.converged);
  CHECK(std::fabs(r.value - 2.0) < 1e-12);

  const double bp_exp[] = {0.0, 5.0};
  auto r2 = integrate_adaptive([](double x) { return std::exp(-x); }, bp_exp, 1e-12, 1e-15, 100);
  CHECK(r2.converged);
  CHECK(std::fabs(r2.value - (1.0 - std::exp(-5.0))) < 1e-13);
}

TEST_CASE("refinement resolves a narrow peak missed by the seed panels") {
  // Gaussian with sigma = 1e-3 centered mid-panel; seed grid is far coarser.
  const double mu = 0.5, sigma = 1e-3;
  auto peak = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
  };
  const double bp[] = {0.0, 0.49, 0.51, 1.0};
  auto r = integrate_adaptive(peak, bp, 1e-10, 1e-14, 2000);
  CHECK(r.converged);
  CHECK(std::fabs(r.value - 1.0) < 1e-9);  // tails beyond [0,1] are ~1e-54000
}

TEST_CASE("integrable endpoint singularity converges without endpoint evaluation") {
  const double bp[] = {0.0, 1.0};
  auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, bp, 1e-10, 1e-14, 5000);
  CHECK(r.converged);
  CHECK(std::fabs(r.value - 2.0) < 1e-8);
}

TEST_CASE("subdivision budget exhaustion reports non-convergence") {
  auto step = [](double x) { return x > 1.0 / M_PI ? 1.0 : 0.0; };
  const double bp[] = {0.0, 1.0};
  auto r = integrate_adaptive(step, bp, 1e-12, 1e-15, 16);
  CHECK_FALSE(r.converged);
  CHECK(r.subdivisions == 16);
}

TEST_CASE("NaN from the integrand aborts with non-convergence") {
  auto bad = [](double x) { return x < 0.5 ? 1.0 : std::numeric_limits<double>::quiet_NaN(); };
  const double bp[] = {0.0, 1.0};
  auto r = integrate_adaptive(bad, bp, 1e-10, 1e-14, 100);
  CHECK_FALSE(r.converged);
}

TEST_CASE("invalid breakpoint lists are rejected") {
  const double one[] = {1.0};
  const double swapped[] = {1.0, 0.0};
  CHECK_THROWS_AS((void)integrate_adaptive([](double) { return 0.0; }, one, 1e-10, 1e-14, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)integrate_adaptive([](double) { return 0.0; }, swapped, 1e-10, 1e-14, 100),
                  std::invalid_argument);
}
