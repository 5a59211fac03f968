// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stokeseig/quadrature.hpp"

using namespace stokeseig;

TEST_CASE("low degree rules match classical tables", "[quadrature]") {
  auto r1 = quadrature_rule(1);
  REQUIRE(r1.size() == 1);
  CHECK_THAT(r1.points[0][0], Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(r1.points[0][1], Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(r1.weights[0], Catch::Matchers::WithinAbs(0.5, 1e-15));

  auto r2 = quadrature_rule(2);
  REQUIRE(r2.size() == 3);
  for (double w : r2.weights)
    CHECK_THAT(w, Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
}

TEST_CASE("monomial exactness for all supported degrees", "[quadrature]") {
  for (int degree = 0; degree <= 10; ++degree) {
    auto rule = quadrature_rule(degree);
    double wsum = 0;
    for (double w : rule.weights) {
      CHECK(w > 0);
      wsum += w;
    }
    CHECK_THAT(wsum, Catch::Matchers::WithinAbs(0.5, 1e-14));
    for (int a = 0; a + 0 <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0;
        for (int q = 0; q < rule.size(); ++q)
          s += rule.weights[q] * std::pow(rule.points[q][0], a) *
               std::pow(rule.points[q][1], b);
        INFO("degree " << degree << " monomial x^" << a << " y^" << b);
        CHECK_THAT(s,
                   Catch::Matchers::WithinAbs(monomial_integral(a, b), 1e-14));
      }
  }
}

TEST_CASE("specific closed-form integrals", "[quadrature]") {
  // int x^2 y = 2! 1! / 5! = 1/60
  CHECK_THAT(monomial_integral(2, 1),
             Catch::Matchers::WithinAbs(1.0 / 60.0, 1e-18));
  auto rule = quadrature_rule(3);
  double s = 0;
  for (int q = 0; q < rule.size(); ++q)
    s += rule.weights[q] * rule.points[q][0] * rule.points[q][0] *
         rule.points[q][1];
  CHECK_THAT(s, Catch::Matchers::WithinAbs(1.0 / 60.0, 1e-15));
}

TEST_CASE("rules are symmetric and deterministic", "[quadrature]") {
  for (int degree : {3, 6, 10}) {
    auto a = quadrature_rule(degree), b = quadrature_rule(degree);
    REQUIRE(a.points == b.points);
    REQUIRE(a.weights == b.weights);

    // cyclic rotation (x,y) -> (y, 1-x-y) maps the rule onto itself:
    // integrating any monomial after rotation gives the same value
    double before = 0, after = 0;
    for (int q = 0; q < a.size(); ++q) {
      double x = a.points[q][0], y = a.points[q][1];
      before += a.weights[q] * x * x * y;
      after += a.weights[q] * y * y * (1 - x - y);
    }
    CHECK_THAT(before, Catch::Matchers::WithinAbs(after, 1e-14));
  }
}

TEST_CASE("unsupported degree rejected", "[quadrature]") {
  CHECK_THROWS_AS(quadrature_rule(11), std::invalid_argument);
  CHECK_THROWS_AS(quadrature_rule(-1), std::invalid_argument);
}
