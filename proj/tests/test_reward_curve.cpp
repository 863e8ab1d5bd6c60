#include "risingts/reward_curve.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace risingts;

TEST_CASE("curve values") {
  const auto lb = RewardCurve::linear_capped(Rational(1, 8), Rational(1, 2), Rational(1));
  CHECK(lb(5) == 0.5);
  CHECK(lb(1) == 0.0);
  CHECK(lb(3) == 0.25);
  CHECK(lb.exact(4) == Rational(3, 8));

  CHECK(RewardCurve::constant(0.3)(1'000'000) == 0.3);
  CHECK(RewardCurve::exponential(1.0, std::numbers::ln2)(3) == doctest::Approx(0.875).epsilon(1e-15));

  // mpmath, 40 digits
  CHECK(RewardCurve::exponential(0.8, 0.05)(10) == doctest::Approx(0.31477547222989326112).epsilon(1e-14));
  CHECK(RewardCurve::polynomial(0.9, 4.0, 0.5)(12) == doctest::Approx(0.21966394858339099101).epsilon(1e-14));
}

TEST_CASE("polynomial curve starts at zero offset and rises to c") {
  const auto f = RewardCurve::polynomial(0.7, 2.0, 0.4);
  double prev = 0.0;
  for (std::uint64_t n = 1; n <= 5000; n += 7) {
    CHECK(f(n) >= prev);
    prev = f(n);
  }
  CHECK(prev < 0.7);
  CHECK(RewardCurve::polynomial(0.7, 0.0, 0.4)(1) == 0.7);
}

TEST_CASE("tabulated curve extends its last value") {
  const auto f = RewardCurve::tabulated({0.1, 0.2, 0.4});
  CHECK(f(2) == 0.2);
  CHECK(f(3) == 0.4);
  CHECK(f(100) == 0.4);
}

TEST_CASE("linear capped clamps at zero before the offset") {
  const auto f = RewardCurve::linear_capped(Rational(1, 10), Rational(1), Rational(5));
  CHECK(f(2) == 0.0);
  CHECK(f(7) == doctest::Approx(0.2));
  CHECK(f.exact(100) == Rational(1));
}

TEST_CASE("curve parameter validation") {
  CHECK_THROWS_AS(RewardCurve::exponential(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::exponential(0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::polynomial(0.5, -1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::polynomial(0.5, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::linear_capped(Rational(-1), Rational(1), Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::tabulated({}), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::tabulated({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::constant(NAN), std::invalid_argument);
  CHECK_THROWS_AS(RewardCurve::constant(0.5)(0), std::invalid_argument);
  CHECK_THROWS_AS((void)RewardCurve::constant(0.5).exact(3), std::logic_error);
}

TEST_CASE("to_rational recovers short decimals") {
  CHECK(to_rational(0.125) == Rational(1, 8));
  CHECK(to_rational(0.6) == Rational(3, 5));
  CHECK(to_rational(1.0 / 6.0) == Rational(1, 6));
  CHECK(to_rational(-3.0) == Rational(-3));
  CHECK_THROWS_AS(to_rational(INFINITY), std::invalid_argument);
  const double odd = std::ldexp(1.0, -60) + 0.5;
  CHECK(to_double(to_rational(odd)) == odd);
}

TEST_CASE("curve equality") {
  CHECK(RewardCurve::constant(0.2) == RewardCurve::constant(0.2));
  CHECK_FALSE(RewardCurve::constant(0.2) == RewardCurve::constant(0.3));
  CHECK_FALSE(RewardCurve::constant(0.2) == RewardCurve::tabulated({0.2}));
  CHECK(RewardCurve::exponential(0.5, 0.1).family_name() == "exponential");
}
