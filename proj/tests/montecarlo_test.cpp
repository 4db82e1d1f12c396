#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "evt/information.hpp"
#include "evt/montecarlo.hpp"
#include "evt/specfun.hpp"

using namespace evt;

namespace {

// critical value of the one-sample KS test, valid for n >= 35
double ks_critical_value(double n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0) / n);
}

double ks_statistic(std::vector<double> samples, const RealFn& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(f - i / n));
  }
  return d;
}

}  // namespace

TEST_CASE("uniform stream basics") {
  const SeededStream s{42, 0};
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = uniform_at(s, i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  // deterministic
  CHECK(uniform_at(s, 123) == uniform_at(SeededStream{42, 0}, 123));
  CHECK(uniform_at(s, 123) != uniform_at(SeededStream{43, 0}, 123));
  CHECK(uniform_at(s, 123) != uniform_at(SeededStream{42, 1}, 123));
}

TEST_CASE("inverse-transform samples pass a KS test at alpha = 0.01") {
  const Distribution expo = make_exponential(1.0);
  const auto samples = sample(expo, {20240811, 0}, 100000);
  const double d = ks_statistic(samples, expo.cdf);
  CHECK(d < ks_critical_value(100000.0, 0.01));
}

TEST_CASE("sorted uniforms map to sorted samples") {
  const Distribution gum = make_gumbel(0.0, 1.0);
  std::vector<double> us;
  for (std::uint64_t i = 0; i < 500; ++i) us.push_back(uniform_at({7, 3}, i));
  std::sort(us.begin(), us.end());
  double prev = -kInf;
  for (double u : us) {
    const double x = gum.quantile(u);
    CHECK(x >= prev);
    prev = x;
  }
}

TEST_CASE("Gumbel sample mean approaches the Euler-Mascheroni constant") {
  const Distribution gum = make_gumbel(0.0, 1.0);
  const auto est = estimate(gum, [](double x) { return x; }, {99, 0}, 1000000);
  CHECK(std::fabs(est.mean - kEulerGamma) < 3.0 * est.std_error);
  CHECK(est.n_samples == 1000000);
  CHECK(est.std_error > 0.0);
}

TEST_CASE("single-uniform maximum sampling") {
  const Distribution expo = make_exponential(1.0);
  SUBCASE("n = 1 with identity norming reproduces the base stream") {
    const auto nm = normalized_max(expo, 1, NormingConstants{1, 1.0, 0.0});
    const auto a = sample(expo, {5, 1}, 2048);
    const auto b = sample_normalized_max(nm, {5, 1}, 2048);
    CHECK(a == b);
  }
  SUBCASE("E log F(M_10) = -1/10 within 3 SE") {
    const auto nm = normalized_max(expo, 10);
    const auto est = estimate(
        nm,
        [&](double z) { return expo.log_cdf(nm.norming.a * z + nm.norming.b); },
        {11, 2}, 1000000);
    CHECK(std::fabs(est.mean - (-0.1)) < 3.0 * est.std_error);
  }
  SUBCASE("-E log(1 - F(M_5)) = H_5 within 3 SE") {
    const auto nm = normalized_max(expo, 5);
    const auto est = estimate(
        nm,
        [&](double z) {
          return -log_survival(expo, nm.norming.a * z + nm.norming.b);
        },
        {11, 3}, 1000000);
    CHECK(std::fabs(est.mean - 2.2833333333333333) < 3.0 * est.std_error);
  }
  SUBCASE("agrees with the literal max-of-n path") {
    const auto nm = normalized_max(expo, 4);
    const auto fast = summarize(sample_normalized_max(nm, {3, 9}, 200000));
    const auto slow = summarize(sample_normalized_max_by_maximum(nm, {4, 9}, 200000));
    const double se = std::hypot(fast.std_error, slow.std_error);
    CHECK(std::fabs(fast.mean - slow.mean) < 4.0 * se);
  }
}

TEST_CASE("estimate examples") {
  const Distribution expo = make_exponential(1.0);
  SUBCASE("entropy of exponential N_10 via 1 - mean score") {
    const auto nm = normalized_max(expo, 10);
    const auto est = estimate(
        nm, [&](double z) { return normalized_max_score(nm, z); }, {123, 0},
        1000000);
    const double entropy = 1.0 - est.mean;
    CHECK(std::fabs(entropy - 1.5263831609742083) < 3.0 * est.std_error);
  }
  SUBCASE("KL of Gumbel(0,1) to itself is 0 within 3 SE") {
    const Distribution gum = make_gumbel(0.0, 1.0);
    // keyDrep integrand at mu=0, beta=1: Theta(x) + x + e^{-x}, minus 1
    const auto est = estimate(
        gum, [&](double x) { return max_score(gum, x) + x + std::exp(-x); },
        {123, 1}, 1000000);
    CHECK(std::fabs(est.mean - 1.0) < 3.0 * est.std_error);
  }
  SUBCASE("KL of exponential N_10 to the standard Gumbel within 3 SE") {
    const auto nm = normalized_max(expo, 10);
    const auto est = estimate(
        nm,
        [&](double z) {
          return normalized_max_score(nm, z) + z + std::exp(-z);
        },
        {123, 2}, 1000000);
    CHECK(std::fabs((est.mean - 1.0) - 1.0 / 110.0) < 3.0 * est.std_error);
  }
}

TEST_CASE("reproducibility and worker independence") {
  const Distribution expo = make_exponential(1.0);
  SUBCASE("same stream, same bytes") {
    const auto a = sample(expo, {2024, 7}, 100000, 1);
    const auto b = sample(expo, {2024, 7}, 100000, 1);
    CHECK(a == b);
  }
  SUBCASE("worker count never changes sample values") {
    const auto w1 = sample(expo, {2024, 8}, 200001, 1);
    const auto w3 = sample(expo, {2024, 8}, 200001, 3);
    const auto w8 = sample(expo, {2024, 8}, 200001, 8);
    CHECK(w1 == w3);
    CHECK(w1 == w8);
  }
  SUBCASE("worker count never changes estimates, bit for bit") {
    auto h = [](double x) { return x * x; };
    const auto e1 = estimate(expo, h, {2024, 9}, 300000, 1);
    const auto e4 = estimate(expo, h, {2024, 9}, 300000, 4);
    const auto e7 = estimate(expo, h, {2024, 9}, 300000, 7);
    CHECK(e1.mean == e4.mean);
    CHECK(e1.std_error == e4.std_error);
    CHECK(e1.mean == e7.mean);
    CHECK(e1.std_error == e7.std_error);
  }
}

TEST_CASE("distinct streams are empirically uncorrelated") {
  const std::uint64_t n = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = uniform_at({31337, 0}, i);
    const double y = uniform_at({31337, 1}, i);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  const double cov = sxy / nn - (sx / nn) * (sy / nn);
  const double vx = sxx / nn - (sx / nn) * (sx / nn);
  const double vy = syy / nn - (sy / nn) * (sy / nn);
  CHECK(std::fabs(cov / std::sqrt(vx * vy)) < 0.01);
}

TEST_CASE("estimator consistency: 19 of 20 seeded replicates within 4 SE") {
  const Distribution expo = make_exponential(1.0);
  const auto nm = normalized_max(expo, 10);
  const double quadrature =
      expectation(as_distribution(nm), [](double z) { return z; }).value;
  int pass = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto est =
        estimate(nm, [](double z) { return z; }, {1000 + rep, 0}, 10000);
    if (std::fabs(est.mean - quadrature) <= 4.0 * est.std_error) ++pass;
  }
  CHECK(pass >= 19);
}

TEST_CASE("estimate error paths") {
  const Distribution expo = make_exponential(1.0);
  SUBCASE("count < 2") {
    CHECK_THROWS_AS(estimate(expo, [](double x) { return x; }, {1, 0}, 1),
                    domain_error);
  }
  SUBCASE("non-finite h names the offending sample") {
    try {
      estimate(
          expo, [](double x) { return x < 2.0 ? x : std::log(-1.0); }, {1, 0},
          100000);
      FAIL("expected evaluation_error");
    } catch (const evaluation_error& e) {
      CHECK(std::string(e.what()).find("sample index") != std::string::npos);
      const auto idx = static_cast<std::uint64_t>(e.at());
      const double bad = expo.quantile(uniform_at({1, 0}, idx));
      CHECK(bad >= 2.0);
      // every earlier sample was fine
      for (std::uint64_t i = 0; i < idx; ++i)
        CHECK(expo.quantile(uniform_at({1, 0}, i)) < 2.0);
    }
  }
}
