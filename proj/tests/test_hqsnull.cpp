#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ddt/errors.hpp"
#include "ddt/hqsnull.hpp"
#include "ddt/stats.hpp"
#include "support/oracles.hpp"

using namespace ddt;

TEST_CASE("moment matching closed forms") {
  const MomentSummary m = MomentSummary::from(1.0, 0.5, 2);
  CHECK(m.mu == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(m.sigma2 == doctest::Approx(-0.5 + std::sqrt(0.5)).epsilon(1e-14));
  // Entry moments of L L^T: mean m mu^2, variance m sigma2 (sigma2 + 2 mu^2).
  CHECK(m.m * m.mu * m.mu == doctest::Approx(1.0));
  CHECK(m.m * m.sigma2 * (m.sigma2 + 2 * m.mu * m.mu) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.noncentrality() == doctest::Approx(2.0 * 2 * 0.5 / m.sigma2));

  const MomentSummary tiny = MomentSummary::from(1e6, 1e-9, 2);
  CHECK(tiny.sigma2 > 0.0);
  CHECK(2 * tiny.sigma2 * (tiny.sigma2 + 2 * tiny.mu * tiny.mu) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("nonpositive mean and zero variance") {
  try {
    MomentSummary::from(-0.3, 0.5, 2, MeanPolicy::Reject);
    FAIL("accepted ebar < 0");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonpositiveMean);
    CHECK(std::string(e.what()).find("clamp") != std::string::npos);
  }
  const MomentSummary c = MomentSummary::from(-0.3, 0.5, 2, MeanPolicy::ClampZero);
  CHECK(c.mean_clamped);
  CHECK(c.mu == 0.0);
  CHECK(c.m * c.sigma2 * c.sigma2 == doctest::Approx(0.5));
  CHECK_THROWS_AS(MomentSummary::from(1.0, 0.0, 2), Error);

  SymmetricMatrix d(6, inv_logit(1.0), 0.0);
  try {
    observed_moments(DifferenceNetwork(d));
    FAIL("accepted a constant network");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroVariance);
  }
}

TEST_CASE("observed moments use the upper triangle on the logit scale") {
  SymmetricMatrix d(3, 0.0, 0.0);
  d.set(0, 1, inv_logit(1.0));
  d.set(0, 2, inv_logit(2.0));
  d.set(1, 2, inv_logit(3.0));
  const MomentSummary m = observed_moments(DifferenceNetwork(d));
  CHECK(m.ebar == doctest::Approx(2.0));
  CHECK(m.vbar == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("null networks") {
  const MomentSummary m = MomentSummary::from(1.0, 0.5, 2);
  SUBCASE("deterministic and execution-independent") {
    const NullEnsemble a = generate_null(m, 20, 30, 42, Exec::Serial);
    const NullEnsemble b = generate_null(m, 20, 30, 42, Exec::Parallel);
    CHECK(a.networks == b.networks);
    CHECK(a.networks[7] == generate_null_network(m, 20, 42, 7));
    CHECK(generate_null(m, 20, 30, 43).networks != a.networks);
  }
  SUBCASE("pooled entries match the target moments") {
    const NullEnsemble e = generate_null(m, 40, 300, 5);
    std::vector<double> pooled;
    for (const auto& net : e.networks) pooled.insert(pooled.end(), net.begin(), net.end());
    CHECK(std::abs(stats::mean(pooled) - 1.0) < 0.02);
    CHECK(std::abs(stats::population_variance(pooled) - 0.5) < 0.03);
  }
  SUBCASE("sigma2 -> 0 collapses every entry to m mu^2") {
    MomentSummary s = m;
    s.sigma2 = 1e-14;
    for (double v : generate_null_network(s, 8, 1, 0)) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("probability scale stays inside (0, 1)") {
    const NullEnsemble e = generate_null(MomentSummary::from(30.0, 400.0, 2), 10, 3, 1);
    const SymmetricMatrix p = e.probability_network(0);
    for (double v : p.upper()) CHECK((v >= 0.0 && v <= 1.0));
    CHECK(p(3, 3) == 0.0);
  }
}

TEST_CASE("mixture law") {
  const MomentSummary m = MomentSummary::from(1.0, 0.5, 2);
  SUBCASE("execution-independent") {
    CHECK(mixture_sample(m, 100'000, 9, Exec::Serial) == mixture_sample(m, 100'000, 9, Exec::Parallel));
  }
  SUBCASE("moments match the Gram entries") {
    const auto x = mixture_sample(m, 400'000, 9);
    CHECK(std::abs(stats::mean(x) - 1.0) < 0.01);
    CHECK(std::abs(stats::population_variance(x) - 0.5) < 0.02);
  }
  SUBCASE("symmetric Laplace when mu = 0") {
    MomentSummary z;
    z.mu = 0.0;
    z.sigma2 = 1.0;
    z.m = 2;
    auto x = mixture_sample(z, 400'000, 4);
    CHECK(std::abs(stats::quantile_inplace(x, 0.5)) < 0.01);
    CHECK(stats::quantile_inplace(x, 0.95) == doctest::Approx(std::log(10.0)).epsilon(0.01));
  }
  SUBCASE("same law as the generated entries") {
    const auto x = mixture_sample(m, 50'000, 21);
    const NullEnsemble e = generate_null(m, 30, 120, 22);
    std::vector<double> pooled;
    for (const auto& net : e.networks) pooled.insert(pooled.end(), net.begin(), net.end());
    pooled.resize(50'000);
    CHECK(oracle::ks_statistic(x, pooled) < 0.015);
  }
}
