// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include <cmath>
#include <vector>

#include "doctest.h"
#include "pmmfp/error_law.hpp"
#include "pmmfp/errors.hpp"
#include "pmmfp/moments.hpp"
#include "pmmfp/rng.hpp"

using namespace pmmfp;

namespace {

Vector draws(const ErrorLaw& law, int n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = law.sample_centred(rng);
  return v;
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("alternating two-point sample is symmetric with unit g2") {
  Vector e(100);
  for (int i = 0; i < 100; ++i) e(i) = (i % 2 == 0) ? 1.0 : -1.0;
  const ResidualCumulants c = sample_cumulants(e);
  CHECK(std::abs(c.gamma3) < 1e-12);
  CHECK(c.gamma4 == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(c.g2 == 1.0);
  CHECK(c.a == 0.0);
  CHECK_FALSE(c.degraded);
}

TEST_CASE("large exponential sample approaches the analytic cumulants") {
  const Vector e = draws(ErrorLaw::exponential(), 1000000, 61);
  const ResidualCumulants c = sample_cumulants(e);
  CHECK(c.gamma3 == doctest::Approx(2.0).epsilon(0.02));
  CHECK(c.gamma4 == doctest::Approx(6.0).epsilon(0.10));
  CHECK(c.g2 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("survival-data-like cumulants reproduce the published factor") {
  CHECK(g2_closed_form(-1.7436, 4.9143) ==
        doctest::Approx(0.5603).epsilon(2e-4));
}

TEST_CASE("closed form identity values") {
  CHECK(g2_closed_form(0.0, 0.0) == 1.0);
  CHECK(g2_closed_form(2.0, 6.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g2_closed_form(2.0 / std::sqrt(3.0), 2.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK_THROWS_AS(g2_closed_form(0.0, -2.0), InvalidKurtosis);
  CHECK_THROWS_AS(g2_closed_form(1.0, -3.0), InvalidKurtosis);
}

TEST_CASE("analytic reduction tiers") {
  CHECK(analytic_cumulants(ErrorLaw::gaussian()).g2 ==
        doctest::Approx(1.000).epsilon(1e-3));
  CHECK(analytic_cumulants(ErrorLaw::beta(2, 5)).g2 ==
        doctest::Approx(0.811).epsilon(2e-3));
  CHECK(analytic_cumulants(ErrorLaw::gamma(3)).g2 ==
        doctest::Approx(0.667).epsilon(2e-3));
  CHECK(analytic_cumulants(ErrorLaw::log_normal(0.5)).g2 ==
        doctest::Approx(0.612).epsilon(2e-3));
  CHECK(analytic_cumulants(ErrorLaw::exponential()).g2 ==
        doctest::Approx(0.500).epsilon(1e-3));
}

TEST_CASE("g2 equals one exactly when and only when skewness vanishes") {
  for (const auto& law :
       {ErrorLaw::gaussian(), ErrorLaw::uniform(-1, 1), ErrorLaw::laplace()}) {
    const ResidualCumulants c = analytic_cumulants(law);
    CHECK(c.gamma3 == 0.0);
    CHECK(c.g2 == 1.0);
  }
  for (const auto& law :
       {ErrorLaw::beta(2, 5), ErrorLaw::gamma(3), ErrorLaw::exponential(),
        ErrorLaw::log_normal(1.0)}) {
    const ResidualCumulants c = analytic_cumulants(law);
    CHECK(c.gamma3 != 0.0);
    CHECK(c.g2 < 1.0);
    CHECK(c.g2 > 0.0);
  }
}

TEST_CASE("generalised gaussian has no analytic entry") {
  CHECK_THROWS_AS(analytic_cumulants(ErrorLaw::generalised_gaussian_half()),
                  UnsupportedLaw);
}

TEST_CASE("sampled skewness converges to the analytic value per law") {
  const int n = 100000;
  const std::vector<ErrorLaw> laws{
      ErrorLaw::gaussian(),     ErrorLaw::beta(2, 5), ErrorLaw::gamma(3),
      ErrorLaw::exponential(),  ErrorLaw::uniform(-1, 1),
      ErrorLaw::laplace(),      ErrorLaw::log_normal(0.5)};
  std::uint64_t seed = 500;
  for (const auto& law : laws) {
    const ResidualCumulants truth = analytic_cumulants(law);
    const ResidualCumulants hat = sample_cumulants(draws(law, n, seed++));
    CHECK_MESSAGE(std::abs(hat.gamma3 - truth.gamma3) <= 0.15,
                  "law ", law.label(), " gamma3 ", hat.gamma3, " vs ",
                  truth.gamma3);
  }
  // The sigma = 1 log-normal's sixth moment is enormous, so gamma3 converges
  // slowly and from below; it gets a documented wider band.
  const ResidualCumulants heavy =
      sample_cumulants(draws(ErrorLaw::log_normal(1.0), n, 777));
  const double target = analytic_cumulants(ErrorLaw::log_normal(1.0)).gamma3;
  CHECK(target == doctest::Approx(6.1849).epsilon(1e-4));
  CHECK(std::abs(heavy.gamma3 - target) <= 2.5);
}

TEST_CASE("skewness is exactly scale invariant") {
  const Vector e = draws(ErrorLaw::gamma(3), 500, 9);
  const double base = sample_cumulants(e).gamma3;
  for (double c : {1e-6, 3.0, 1e6}) {
    const double scaled = sample_cumulants((c * e).eval()).gamma3;
    CHECK(std::abs(scaled - base) <= 1e-12 * std::max(1.0, std::abs(base)));
  }
}

TEST_CASE("minimum sample size and degenerate variance are rejected") {
  CHECK_THROWS_AS(sample_cumulants(Vector::Ones(7)), TooFewObservations);
  CHECK_THROWS_AS(sample_cumulants(Vector::Ones(20)), DegenerateVariance);
  CHECK_NOTHROW(sample_cumulants(draws(ErrorLaw::gaussian(), 8, 1)));
}

TEST_CASE("impossible moment region clamps and flags") {
  // A skewed two-point sample sits exactly on gamma3^2 = 2 + gamma4, so the
  // raw identity would give g2 = 0; the estimate must clamp, not error.
  Vector e(10);
  e.setZero();
  e(9) = 10.0;
  const ResidualCumulants c = sample_cumulants(e);
  CHECK(c.gamma3 == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(c.gamma4 == doctest::Approx(46.0 / 9.0).epsilon(1e-12));
  CHECK(c.g2 == doctest::Approx(1e-6));
  CHECK(c.degraded);
}

TEST_CASE("sample cumulants report the 1/n variance") {
  Vector e(8);
  e << -1, 1, -1, 1, -1, 1, -2, 2;
  const ResidualCumulants c = sample_cumulants(e);
  CHECK(c.sigma2 == doctest::Approx(14.0 / 8.0).epsilon(1e-12));
}

}  // TEST_SUITE
