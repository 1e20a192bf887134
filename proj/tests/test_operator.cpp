#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hop/errors.hpp"
#include "hop/operator.hpp"
#include "oracles.hpp"

using namespace hop;

TEST_CASE("path graph spectrum") {
  const Eigen::Index n = 31;
  const FiniteOperator op(WeightSequence::from_values(Eigen::ArrayXd::Ones(n)));
  const auto ev = eigenvalues_oracle(op);
  const auto ref = oracle::path_spectrum(n + 1);
  REQUIRE(ev.size() == ref.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("negcount agrees with a dense eigensolver") {
  const auto spec = WeightProcessSpec::lognormal(1.5, 3);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto w = sample(spec, 3 + 2 * (t % 7), t);
    const FiniteOperator op(w);
    const auto ev = oracle::dense_spectrum(w.values);
    for (double x : {-3.0, -0.7, -0.01, 0.013, 0.4, 2.5, 40.0})
      CHECK(negcount(op, x).count == oracle::count_below(ev, x));
  }
}

TEST_CASE("tiny windows in log coordinates") {
  // Weights alternating 1 and e^{-L} isolate two eigenvalues of size ~ e^{-L k}.
  // For a 4x4 chain lambda^2 = 2 a1^2 a3^2 / (s + sqrt(s^2 - 4 a1^2 a3^2)), s = sum a_i^2.
  const double a1 = std::exp(-30.0), a2 = 1.0, a3 = std::exp(-30.0);
  const FiniteOperator op(WeightSequence::from_values({a1, a2, a3}));
  const double s = a1 * a1 + a2 * a2 + a3 * a3;
  const double p = a1 * a1 * a3 * a3;
  const double ls = 0.5 * std::log(2 * p / (s + std::sqrt(s * s - 4 * p)));
  CHECK(ls == doctest::Approx(-60.0).epsilon(1e-9));
  CHECK(count_in_window(op, SignedLog::from_log(ls + 1e-6)).positive == 1);
  CHECK(count_in_window(op, SignedLog::from_log(ls - 1e-6)).positive == 0);
  // Far beyond double range the counts still work.
  Eigen::ArrayXd a(5);
  a << std::exp(-400.0), 1, std::exp(-400.0), 1, std::exp(-400.0);
  const FiniteOperator deep(WeightSequence::from_values(a));
  // det = (a1 a3 a5)^2 = e^{-2400} and the other four eigenvalues are near +-1.
  CHECK(count_in_window(deep, SignedLog::from_log(-1201)).positive == 0);
  CHECK(count_in_window(deep, SignedLog::from_log(-1199)).positive == 1);
  CHECK(count_in_window(deep, SignedLog::from_log(-1.0)).positive == 1);
  CHECK(count_in_window(deep, SignedLog::from_log(1.0)).positive == 3);
}

TEST_CASE("symmetric window is twice the positive count") {
  const auto spec = WeightProcessSpec::dyson_gamma(1, 9);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto w = sample(spec, 41, t);
    const FiniteOperator op(w);
    const auto ev = oracle::tridiagonal_spectrum(w.values);
    for (double lg : {-6.0, -2.0, 0.0}) {
      const auto c = count_in_window(op, SignedLog::from_log(lg));
      CHECK(c.window == 2 * c.positive);
      CHECK(c.window == oracle::count_in(ev, -std::exp(lg), std::exp(lg)));
    }
  }
}

TEST_CASE("argument checks") {
  const FiniteOperator even(WeightSequence::from_values({1.0, 2.0}));
  CHECK_THROWS_AS(count_in_window(even, SignedLog::from_value(0.1)), ConfigError);
  const FiniteOperator odd(WeightSequence::from_values({1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(negcount(odd, 0.0), SpectralCollision);
  CHECK(negcount(odd, SignedLog::infinity(1)).count == 4);
  CHECK(negcount(odd, SignedLog::infinity(-1)).count == 0);
}

TEST_CASE("eigenvalues_oracle matches Eigen") {
  const auto spec = WeightProcessSpec::two_point(0.9, 2);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto w = sample(spec, 25, t);
    const auto ev = eigenvalues_oracle(FiniteOperator(w));
    const auto ref = oracle::tridiagonal_spectrum(w.values);
    REQUIRE(ev.size() == ref.size());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(ref[i]).epsilon(1e-9));
  }
}

TEST_CASE("cutting an edge moves the spectral CDF by at most one atom") {
  const auto spec = WeightProcessSpec::lognormal(1.0, 4);
  for (std::uint64_t t = 0; t < 30; ++t) {
    const auto w = sample(spec, 63, t);
    const FiniteOperator op(w);
    const auto cut = cut_edge(op, 1 + static_cast<Eigen::Index>(t % 63));
    const auto e1 = eigenvalues_oracle(op), e2 = eigenvalues_oracle(cut);
    CHECK(kolmogorov_count(e1, e2) <= 1);
    CHECK(kolmogorov_count(e1, e2) == oracle::cdf_gap(e1, e2));
    CHECK(kolmogorov_distance(e1, e2) <= 1.0 / double(e1.size()) + 1e-15);
  }
  CHECK_THROWS_AS(kolmogorov_distance({1.0}, {1.0, 2.0}), ConfigError);
}
