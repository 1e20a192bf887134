#include "hop/groups.hpp"

#include <cmath>
#include <numbers>

#include "hop/errors.hpp"

namespace hop {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::int64_t mod(__int128 a, std::int64_t q) {
  __int128 r = a % q;
  if (r < 0) r += q;
  return static_cast<std::int64_t>(r);
}

double grid_to_unit(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

}  // namespace

double TorusPoint::x1() const { return grid_to_unit(u1); }
double TorusPoint::x2() const { return grid_to_unit(u2); }

TorusPoint TorusPoint::from_double(double x1, double x2) {
  auto conv = [](double x) {
    x -= std::floor(x);
    return static_cast<std::uint64_t>(std::ldexp(x, 53)) << 11;
  };
  return {conv(x1), conv(x2)};
}

ToralSystem::ToralSystem() {
  B << 2, 1, 1, 1;
}

ToralSystem::ToralSystem(const IntMatrix2& b, double c) : B(b), shift(c) {}

ToralSystem ToralSystem::from_spec(const WeightProcessSpec& spec) {
  IntMatrix2 b;
  b << spec.matrix[0], spec.matrix[1], spec.matrix[2], spec.matrix[3];
  return ToralSystem(b, spec.shift);
}

void ToralSystem::validate() const {
  const std::int64_t det = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
  const std::int64_t tr = B.trace();
  if (det != 1 && det != -1) throw ConfigError("toral: matrix must have det +-1");
  if (std::abs(tr) <= 2) throw ConfigError("toral: matrix is not hyperbolic (|trace| <= 2)");
}

TorusPoint ToralSystem::apply(TorusPoint x) const {
  auto c = [](std::int64_t v) { return static_cast<std::uint64_t>(v); };
  return {c(B(0, 0)) * x.u1 + c(B(0, 1)) * x.u2, c(B(1, 0)) * x.u1 + c(B(1, 1)) * x.u2};
}

RationalPoint ToralSystem::apply(const RationalPoint& x) const {
  const __int128 a = static_cast<__int128>(B(0, 0)) * x.p1 + static_cast<__int128>(B(0, 1)) * x.p2;
  const __int128 b = static_cast<__int128>(B(1, 0)) * x.p1 + static_cast<__int128>(B(1, 1)) * x.p2;
  return {mod(a, x.q), mod(b, x.q), x.q};
}

double ToralSystem::f(double x1, double x2) const {
  return 2 * std::cos(kTwoPi * x1) + 2 * std::cos(kTwoPi * x2) + shift;
}

double ToralSystem::f(const RationalPoint& x) const {
  const double q = static_cast<double>(x.q);
  return f(static_cast<double>(x.p1) / q, static_cast<double>(x.p2) / q);
}

TorusPoint haar_point(std::uint64_t seed, std::uint64_t trial) {
  Rng rng = trial_rng(mix_seed(seed, hash_name("haar")), trial);
  TorusPoint x;
  x.u1 = rng();
  x.u2 = rng();
  return x;
}

WeightSequence toral_orbit_weights(const ToralSystem& sys, TorusPoint x0, Eigen::Index n) {
  sys.validate();
  Eigen::ArrayXd v(n);
  TorusPoint x = x0;
  for (Eigen::Index k = 0; k < n; ++k) {
    x = sys.apply(x);
    v[k] = sys.f(x);
  }
  return WeightSequence::from_values(v, {"toral-orbit", 0, 0});
}

WeightSequence toral_orbit_weights(const ToralSystem& sys, const RationalPoint& x0,
                                   Eigen::Index n) {
  sys.validate();
  if (x0.q < 1) throw ConfigError("rational point needs a positive denominator");
  Eigen::ArrayXd v(n);
  RationalPoint x{mod(x0.p1, x0.q), mod(x0.p2, x0.q), x0.q};
  for (Eigen::Index k = 0; k < n; ++k) {
    x = sys.apply(x);
    v[k] = sys.f(x);
  }
  return WeightSequence::from_values(v, {"toral-rational-orbit", 0, 0});
}

std::int64_t orbit_period(const ToralSystem& sys, const RationalPoint& x0,
                          std::int64_t max_steps) {
  if (x0.q < 1) throw ConfigError("rational point needs a positive denominator");
  const RationalPoint start{mod(x0.p1, x0.q), mod(x0.p2, x0.q), x0.q};
  RationalPoint x = start;
  for (std::int64_t k = 1; k <= max_steps; ++k) {
    x = sys.apply(x);
    if (x == start) return k;
  }
  return 0;
}

CoboundaryResult coboundary_check(const ToralSystem& sys, const RationalPoint& x0) {
  sys.validate();
  CoboundaryResult r;
  r.period = orbit_period(sys, x0);
  if (r.period == 0) throw ConfigError("coboundary_check: starting point is not periodic");
  r.length = r.period % 2 == 0 ? r.period : 2 * r.period;
  RationalPoint x{mod(x0.p1, x0.q), mod(x0.p2, x0.q), x0.q};
  for (std::int64_t j = 0; j < r.length; ++j) {
    const double g = std::log(std::abs(sys.f(x)));
    (j % 2 == 0 ? r.lhs : r.rhs) += g;
    x = sys.apply(x);
  }
  r.distinct = std::abs(r.lhs - r.rhs) > 1e-9;
  return r;
}

WeightProcessSpec lamplighter_process(const LamplighterSpec& spec, std::uint64_t seed) {
  if (spec.lamp) {
    return WeightProcessSpec::from_sampler(
        spec.lamp, spec.lamp_name.empty() ? "lamp" : spec.lamp_name, seed);
  }
  if (spec.p == 0.5)
    throw ConfigError(
        "lamplighter: p = 1/2 makes half of the weights zero (edge percolation); "
        "the operator splits and the process is not admissible");
  return WeightProcessSpec::two_point(spec.p, seed);
}

}  // namespace hop
