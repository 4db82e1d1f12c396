#include <cmath>

#include "doctest.h"
#include "evt/expr.hpp"

using namespace evt;

TEST_CASE("expression parsing and evaluation") {
  CHECK(Expr::parse("(1 - u)^2")(0.5) == doctest::Approx(0.25));
  CHECK(Expr::parse("1 + 2*u - u/2")(1.0) == doctest::Approx(2.5));
  CHECK(Expr::parse("exp(-u) + log(u)")(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(Expr::parse("pow(u, 3)")(2.0) == doctest::Approx(8.0));
  CHECK(Expr::parse("sqrt(u)")(9.0) == doctest::Approx(3.0));
  CHECK(Expr::parse("-u^2")(3.0) == doctest::Approx(-9.0));   // -(u^2)
  CHECK(Expr::parse("2^3^1")(0.0) == doctest::Approx(8.0));   // right assoc
  CHECK(Expr::parse("1/(1+u)")(1.0) == doctest::Approx(0.5));
  CHECK(Expr::parse("pi")(0.0) == doctest::Approx(M_PI));
}

TEST_CASE("expression parse errors") {
  CHECK_THROWS_AS(Expr::parse("1 +"), parse_error);
  CHECK_THROWS_AS(Expr::parse("foo(u)"), parse_error);
  CHECK_THROWS_AS(Expr::parse("pow(u)"), parse_error);
  CHECK_THROWS_AS(Expr::parse("(1 - u"), parse_error);
  CHECK_THROWS_AS(Expr::parse("1 2"), parse_error);
  CHECK_THROWS_AS(Expr::parse("v + 1"), parse_error);
}
