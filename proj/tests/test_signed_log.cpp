#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hop/signed_log.hpp"

using hop::SignedLog;

TEST_CASE("round trip through values") {
  for (double v : {3.5, -2.0, 1e-300, -7e200, 1.0}) {
    CHECK(SignedLog::from_value(v).value() == doctest::Approx(v).epsilon(1e-14));
  }
  CHECK(SignedLog::from_value(0.0).is_zero());
  CHECK(SignedLog::infinity(-1).is_infinite());
  CHECK(SignedLog::zero().reciprocal().is_infinite());
}

TEST_CASE("arithmetic matches doubles on random operands") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng);
    const auto A = SignedLog::from_value(a), B = SignedLog::from_value(b);
    CHECK((A * B).value() == doctest::Approx(a * b).epsilon(1e-12));
    CHECK((A / B).value() == doctest::Approx(a / b).epsilon(1e-12));
    CHECK((A + B).value() == doctest::Approx(a + b).epsilon(1e-9).scale(std::abs(a) + std::abs(b)));
    CHECK(((A < B) == (a < b)));
  }
}

TEST_CASE("no underflow far below double range") {
  const auto tiny = SignedLog::from_log(-1e4);
  const auto sum = tiny + tiny;
  CHECK(sum.sign == 1);
  CHECK(sum.logmag == doctest::Approx(-1e4 + std::log(2.0)));
  const auto diff = add(SignedLog::from_log(-1e4), -SignedLog::from_log(-1e4 - 1));
  CHECK_FALSE(diff.cancelled);
  CHECK(diff.value.logmag == doctest::Approx(-1e4 + std::log1p(-std::exp(-1.0))));
}

TEST_CASE("near-equal opposite operands report cancellation") {
  const auto a = SignedLog::from_log(2.0);
  const auto b = SignedLog::from_log(2.0 + 1e-14, -1);
  CHECK(add(a, b).cancelled);
  CHECK_FALSE(add(a, SignedLog::from_log(2.0 + 1e-6, -1)).cancelled);
  CHECK(add(SignedLog::infinity(1), SignedLog::infinity(-1)).cancelled);
  CHECK((SignedLog::infinity(1) + SignedLog::from_value(3.0)).is_infinite());
}

TEST_CASE("ordering across signs and infinities") {
  CHECK(SignedLog::infinity(-1) < SignedLog::from_value(-1e300));
  CHECK(SignedLog::from_value(-1.0) < SignedLog::zero());
  CHECK(SignedLog::zero() < SignedLog::from_log(-800));
  CHECK(SignedLog::from_log(800) < SignedLog::infinity(1));
  CHECK(SignedLog::from_value(-3.0) < SignedLog::from_value(-2.0));
}
