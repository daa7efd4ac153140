#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sigkit/lifetimes.hpp"
#include "support.hpp"

using namespace sigkit;

namespace {

SamplingConfig config(std::uint64_t seed, std::uint64_t samples, unsigned threads = 1) {
  SamplingConfig c;
  c.seed = seed;
  c.samples = samples;
  c.threads = threads;
  return c;
}

bool within_3se(double estimate, double truth, double se) { return std::abs(estimate - truth) <= 3.0 * se + 1e-15; }

}  // namespace

TEST_CASE("marginal distributions") {
  const Marginal e(Exponential{2.0});
  CHECK(e.cdf(1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(e.cdf(-1.0) == 0.0);
  CHECK(e.mean() == doctest::Approx(0.5));
  const Marginal w(Weibull{2.0, 1.0});
  CHECK(w.survival(1.5) == doctest::Approx(std::exp(-2.25)));
  const Marginal u(Uniform{2.0});
  CHECK(u.cdf(0.5) == doctest::Approx(0.25));
  CHECK(u.cdf(3.0) == 1.0);
  CHECK_THROWS_AS(Marginal(Exponential{0.0}), InputError);
  CHECK_THROWS_AS(Marginal(Weibull{1.0, -1.0}), InputError);
  CHECK_THROWS_AS(Marginal(Uniform{std::nan("")}), InputError);
}

TEST_CASE("lifetime model validation") {
  CHECK_THROWS_AS(LifetimeModel::exchangeable_mixture(2, {{0.5, Exponential{1.0}}, {0.4, Exponential{2.0}}}),
                  InputError);
  CHECK_THROWS_AS(LifetimeModel::exchangeable_mixture(2, {}), InputError);
  CHECK_THROWS_AS(LifetimeModel::iid(0, Exponential{1.0}), SizeLimitExceeded);
  const auto m = LifetimeModel::exchangeable_mixture(2, {{0.25, Exponential{1.0}}, {0.75, Exponential{2.0}}});
  CHECK(m.mixture()[1].weight == doctest::Approx(0.75));
}

TEST_CASE("golden sample stream") {
  // Regression fixture for libstdc++'s mt19937_64 and exponential_distribution.
  const auto model = LifetimeModel::iid(4, Exponential{1.0});
  LifetimeSampler sampler(model, 20261018, 0, 1);
  const double golden[3][4] = {
      {0.038520090371868633, 0.48527346286469875, 0.62424277528364336, 0.83016054933870642},
      {1.9660172203454205, 1.9778408112653001, 0.93322769778069681, 3.1702157422196948},
      {1.0671441974960894, 1.6419850701035543, 0.908162812988764, 1.3684184361734451},
  };
  for (const auto& row : golden) {
    const auto s = sampler.next();
    for (int i = 0; i < 4; ++i) CHECK(s[i] == row[i]);
  }
}

TEST_CASE("sampling is deterministic and independent of thread count") {
  const auto model = LifetimeModel::iid(4, Exponential{1.0});
  const auto phi1 = test::pair_phi1();
  const auto phi2 = test::pair_phi2();
  const auto a = empirical_joint_signature(model, phi1, phi2, config(7, 20000, 1));
  const auto b = empirical_joint_signature(model, phi1, phi2, config(7, 20000, 4));
  const auto c = empirical_joint_signature(model, phi1, phi2, config(7, 20000, 4));
  CHECK(a.counts == b.counts);
  CHECK(b.counts == c.counts);
  const auto d = empirical_joint_signature(model, phi1, phi2, config(8, 20000, 1));
  CHECK(a.counts != d.counts);
  const auto all = sample(model, config(7, 10));
  const auto again = sample(model, config(7, 10));
  REQUIRE(all.size() == 10);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(std::ranges::equal(all[i].times(), again[i].times()));
}

TEST_CASE("independent exponential means") {
  const auto model = LifetimeModel::independent({Exponential{1.0}, Exponential{2.0}});
  const std::uint64_t n = 100000;
  const auto draws = sample(model, config(12, n));
  for (int i = 0; i < 2; ++i) {
    double sum = 0, sq = 0;
    for (const auto& s : draws) {
      sum += s[i];
      sq += s[i] * s[i];
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(within_3se(mean, 1.0 / (i + 1), se));
  }
}

TEST_CASE("exchangeable mixture is symmetric") {
  const auto model = LifetimeModel::exchangeable_mixture(2, {{0.5, Exponential{1.0}}, {0.5, Weibull{3.0, 2.0}}});
  const auto pm = empirical_permutation_model(model, config(3, 100000));
  const double p = pm.probability({1, 2});
  CHECK(within_3se(p, 0.5, std::sqrt(0.25 / 100000)));
}

TEST_CASE("empirical signatures for the two-component counterexample") {
  const auto model = LifetimeModel::independent({Exponential{1.0}, Exponential{2.0}});
  const auto phi1 = StructureFunction::from_min_path_sets(2, {{1}});
  const auto phi2 = StructureFunction::from_min_path_sets(2, {{1, 2}});
  const auto r = empirical_joint_signature(model, phi1, phi2, config(5, 100000));
  CHECK(r.estimate.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(within_3se(r.estimate(0, 0), 1.0 / 3.0, r.standard_error(0, 0)));
  CHECK(within_3se(r.estimate(1, 0), 2.0 / 3.0, r.standard_error(1, 0)));
  CHECK(r.counts(0, 1) == 0);
  CHECK(r.counts(1, 1) == 0);
  CHECK(r.samples == 100000);
  CHECK(r.seed == 5);

  const auto pm = empirical_permutation_model(model, config(5, 100000));
  const double se = std::sqrt((2.0 / 9.0) / 100000);
  CHECK(within_3se(pm.probability({1, 2}), 1.0 / 3.0, se));
  const auto q = q_from_model(pm);
  CHECK(q(0b10) == doctest::Approx(pm.probability({1, 2})));
  CHECK(within_3se(q(0b10), 1.0 / 3.0, se));
}

TEST_CASE("identical systems put all mass on the diagonal") {
  const auto model = LifetimeModel::iid(4, Weibull{2.0, 1.0});
  const auto phi = test::pair_phi2();
  const auto r = empirical_joint_signature(model, phi, phi, config(9, 5000));
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      if (k != l) CHECK(r.counts(k, l) == 0);
    }
  }
}

TEST_CASE("rank marginals match univariate empirical signatures") {
  const auto model = LifetimeModel::independent({Exponential{1.0}, Exponential{2.0}, Uniform{1.5}, Weibull{0.7, 1.0}});
  const auto phi1 = test::pair_phi1();
  const auto phi2 = test::pair_phi2();
  const auto cfg = config(21, 30000, 3);
  const auto joint = empirical_joint_signature(model, phi1, phi2, cfg);
  const auto s1 = empirical_signature(model, phi1, cfg);
  const auto s2 = empirical_signature(model, phi2, cfg);
  CHECK(joint.counts.rowwise().sum() == s1.counts);
  CHECK(joint.counts.colwise().sum().transpose() == s2.counts);
}

TEST_CASE("iid orderings are equally likely") {
  const auto model = LifetimeModel::iid(3, Uniform{1.0});
  const std::uint64_t n = 120000;
  const auto pm = empirical_permutation_model(model, config(13, n, 2));
  CHECK(pm.probabilities().size() == 6);
  const double se = std::sqrt((1.0 / 6.0) * (5.0 / 6.0) / n);
  for (const auto& [sigma, p] : pm.probabilities()) CHECK(within_3se(p, 1.0 / 6.0, se));
}

TEST_CASE("exchangeable lifetimes reproduce the structure joint signature") {
  const auto model = LifetimeModel::exchangeable_mixture(4, {{0.3, Exponential{1.0}}, {0.7, Uniform{2.0}}});
  const auto exact = test::pair_signature();
  const auto r = empirical_joint_signature(model, test::pair_phi1(), test::pair_phi2(), config(17, 200000, 4));
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      const double p = scalar_cast<double>(exact(k, l));
      const double se = std::sqrt(p * (1 - p) / r.samples);
      CHECK(within_3se(r.estimate(k, l), p, se));
    }
  }
}

TEST_CASE("sampler errors") {
  const auto model = LifetimeModel::iid(2, Exponential{1.0});
  CHECK_THROWS_AS(sample(model, config(1, 0)), InputError);
  CHECK_THROWS_AS(empirical_signature(model, test::pair_phi1(), config(1, 10)), DimensionMismatch);
  CHECK_THROWS_AS(empirical_permutation_model(LifetimeModel::iid(9, Exponential{1.0}), config(1, 10)),
                  SizeLimitExceeded);
  // Every draw underflows to zero, so every vector is rejected.
  const auto degenerate = LifetimeModel::iid(2, Uniform{5e-324});
  LifetimeSampler sampler(degenerate, 1);
  CHECK_THROWS_AS(sampler.next(), TieResampleExhausted);
}
