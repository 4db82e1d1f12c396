#include <cmath>
#include <vector>

#include "doctest.h"
#include "evt/normalize.hpp"

using namespace evt;

TEST_CASE("norming constants: closed forms") {
  SUBCASE("exponential lambda=2, n=10") {
    const auto c = norming_constants(make_exponential(2.0), 10);
    CHECK(c.a == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.b == doctest::Approx(1.1512925464970228).epsilon(1e-14));
  }
  SUBCASE("Gnedenko n=100") {
    const auto c = norming_constants(make_gnedenko(), 100);
    CHECK(c.b == doctest::Approx(0.82159328498181579).epsilon(1e-13));
    CHECK(c.a == doctest::Approx(0.031828955963579595).epsilon(1e-12));
  }
  SUBCASE("n = 1 lands on the lower support edge") {
    const auto ce = norming_constants(make_exponential(2.0), 1);
    CHECK(ce.b == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ce.a == doctest::Approx(0.5).epsilon(1e-14));
    const auto cg = norming_constants(make_gnedenko(), 1);
    CHECK(cg.b == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cg.a == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("n = 1 is rejected for laws unbounded below") {
    CHECK_THROWS_AS(norming_constants(make_gumbel(0.0, 1.0), 1), domain_error);
  }
  SUBCASE("n = 0 is a domain error") {
    CHECK_THROWS_AS(norming_constants(make_exponential(1.0), 0), domain_error);
  }
  SUBCASE("no spec and no closed form is unsupported") {
    Distribution bare = make_gumbel(0.0, 1.0);
    bare.von_mises.reset();
    bare.norming_b_from_log_n = nullptr;
    CHECK_THROWS_AS(norming_constants(bare, 10), unsupported_error);
  }
}

TEST_CASE("closed-form norming agrees with the tail-equation root") {
  // the generic solver (no registered closed form) must reproduce b_n
  for (auto law : {make_exponential(1.5), make_gnedenko(), make_gumbel(0.0, 1.0)}) {
    Distribution generic = law;
    generic.norming_b_from_log_n = nullptr;
    for (std::uint64_t n : {2ull, 10ull, 1000ull}) {
      const auto closed = norming_constants(law, n);
      const auto solved = norming_constants(generic, n);
      CHECK(solved.b == doctest::Approx(closed.b).epsilon(1e-9));
      CHECK(solved.a == doctest::Approx(closed.a).epsilon(1e-9));
    }
  }
}

TEST_CASE("defining equation 1 - F(b_n) = 1/n") {
  const std::vector<Distribution> laws = {make_exponential(1.0),
                                          make_exponential(2.0), make_gnedenko()};
  for (const auto& law : laws) {
    for (std::uint64_t n : {1ull, 10ull, 1000ull, 10000ull}) {
      const auto c = norming_constants(law, n);
      CHECK(std::fabs((1.0 - law.cdf(c.b)) - 1.0 / static_cast<double>(n)) <
            1e-9);
      CHECK(c.a > 0.0);
    }
  }
  for (std::uint64_t n : {2ull, 100ull}) {
    const auto law = make_gumbel(0.0, 1.0);
    const auto c = norming_constants(law, n);
    CHECK(std::fabs((1.0 - law.cdf(c.b)) - 1.0 / static_cast<double>(n)) < 1e-9);
  }
}

TEST_CASE("G(b_n) = log(c n): the two defining forms agree") {
  for (const auto& law : {make_exponential(1.0), make_gnedenko()}) {
    const auto& vm = *law.von_mises;
    for (std::uint64_t n : {2ull, 10ull, 1000ull}) {
      const auto c = norming_constants(law, n);
      CHECK(vm.big_g(c.b) ==
            doctest::Approx(std::log(vm.c * static_cast<double>(n)))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("normalized max cdf") {
  SUBCASE("identity norming reproduces the base") {
    const Distribution expo = make_exponential(1.0);
    const auto nm = normalized_max(expo, 1, NormingConstants{1, 1.0, 0.0});
    for (double x : {0.1, 1.0, 3.0})
      CHECK(normalized_max_cdf(nm, x) == doctest::Approx(expo.cdf(x)).epsilon(1e-14));
  }
  SUBCASE("exponential n=10 at the norming point") {
    const auto nm = normalized_max(make_exponential(1.0), 10);
    CHECK(normalized_max_cdf(nm, 0.0) ==
          doctest::Approx(std::pow(0.9, 10)).epsilon(1e-12));
    CHECK(std::pow(0.9, 10) == doctest::Approx(0.34867844010000004).epsilon(1e-15));
  }
  SUBCASE("Gumbel max-stability with a = 1, b = log n") {
    const Distribution gum = make_gumbel(0.0, 1.0);
    for (std::uint64_t n : {2ull, 10ull}) {
      const auto nm = normalized_max(
          gum, n, NormingConstants{n, 1.0, std::log(static_cast<double>(n))});
      for (double x : {-1.0, 0.0, 2.0}) {
        CHECK(normalized_max_cdf(nm, x) ==
              doctest::Approx(std::exp(-std::exp(-x))).epsilon(1e-12));
      }
    }
  }
  SUBCASE("clamps at support edges") {
    const auto nm = normalized_max(make_gnedenko(), 10);
    const double top = (1.0 - nm.norming.b) / nm.norming.a;
    CHECK(normalized_max_cdf(nm, top + 1.0) == 1.0);
    const double bottom = (0.0 - nm.norming.b) / nm.norming.a;
    CHECK(normalized_max_cdf(nm, bottom - 1.0) == 0.0);
  }
}

TEST_CASE("normalized max score") {
  SUBCASE("exponential closed form -z - log(1 - e^{-z}/n)") {
    const auto nm = normalized_max(make_exponential(1.0), 10);
    for (double z : {-1.0, 0.0, 1.0, 3.0}) {
      const double expected = -z - std::log1p(-std::exp(-z) / 10.0);
      CHECK(normalized_max_score(nm, z) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(normalized_max_score(nm, 1.0) ==
          doctest::Approx(-0.96251831198376478).epsilon(1e-13));
  }
  SUBCASE("n=1 identity norming gives the base score") {
    const Distribution expo = make_exponential(1.0);
    const auto nm = normalized_max(expo, 1, NormingConstants{1, 1.0, 0.0});
    for (double z : {0.5, 1.0, 2.0})
      CHECK(normalized_max_score(nm, z) ==
            doctest::Approx(max_score(expo, z)).epsilon(1e-14));
  }
  SUBCASE("domain errors propagate") {
    const auto nm = normalized_max(make_exponential(1.0), 10);
    // a z + b below the base support
    CHECK_THROWS_AS(normalized_max_score(nm, -std::log(10.0) - 1.0), domain_error);
  }
}

TEST_CASE("normalized score identity on an interior grid") {
  for (const auto& law : {make_exponential(1.0), make_gnedenko()}) {
    for (std::uint64_t n : {2ull, 10ull, 100ull}) {
      const auto nm = normalized_max(law, n);
      const Distribution as_dist = as_distribution(nm);
      for (int i = 0; i < 50; ++i) {
        const double u = (i + 0.5) / 50.0;
        const double z = normalized_quantile(nm, u);
        const double direct = as_dist.log_pdf(z) - as_dist.log_cdf(z);
        CHECK(std::fabs(normalized_max_score(nm, z) - direct) < 1e-10);
      }
    }
  }
}

TEST_CASE("normalized quantile") {
  SUBCASE("identity norming") {
    const Distribution expo = make_exponential(1.0);
    const auto nm = normalized_max(expo, 1, NormingConstants{1, 1.0, 0.0});
    for (double u : {0.1, 0.5, 0.9})
      CHECK(normalized_quantile(nm, u) == doctest::Approx(expo.quantile(u)).epsilon(1e-14));
  }
  SUBCASE("inverse of the cdf example") {
    const auto nm = normalized_max(make_exponential(1.0), 10);
    CHECK(std::fabs(normalized_quantile(nm, std::pow(0.9, 10))) < 1e-9);
  }
  SUBCASE("monotone on a 99-point grid") {
    for (const auto& law : {make_exponential(1.0), make_gnedenko()}) {
      const auto nm = normalized_max(law, 10);
      double prev = -kInf;
      for (int i = 1; i <= 99; ++i) {
        const double q = normalized_quantile(nm, i / 100.0);
        CHECK(q > prev);
        prev = q;
      }
    }
  }
  SUBCASE("roundtrip through the normalized cdf") {
    const auto nm = normalized_max(make_gnedenko(), 100);
    for (double u : {0.01, 0.25, 0.5, 0.75, 0.99}) {
      CHECK(std::fabs(normalized_max_cdf(nm, normalized_quantile(nm, u)) - u) <
            1e-10);
    }
  }
}

TEST_CASE("pointwise score convergence to -z for the exponential") {
  // sup over a z-grid of |Theta_{N_n}(z) + z| shrinks as n grows
  double prev = kInf;
  for (std::uint64_t n : {10ull, 100ull, 1000ull}) {
    const auto nm = normalized_max(make_exponential(1.0), n);
    double worst = 0.0;
    for (int i = 0; i <= 70; ++i) {
      const double z = -2.0 + 7.0 * i / 70.0;
      worst = std::max(worst, std::fabs(normalized_max_score(nm, z) + z));
    }
    CHECK(worst < prev);
    prev = worst;
  }
  // the sup is attained at z = -2, where the gap is -log(1 - e^2/n)
  CHECK(prev < 0.008);
}

TEST_CASE("as_distribution exposes a consistent law") {
  const auto nm = normalized_max(make_exponential(1.0), 10);
  const Distribution d = as_distribution(nm);
  for (double u : {0.05, 0.5, 0.95}) {
    const double x = d.quantile(u);
    CHECK(d.cdf(x) == doctest::Approx(u).epsilon(1e-10));
    CHECK(d.log_cdf(x) == doctest::Approx(std::log(u)).epsilon(1e-10));
    const double h = 1e-6;
    const double fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
    CHECK(d.pdf(x) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(d.support.lower == doctest::Approx(-std::log(10.0)).epsilon(1e-12));
}
