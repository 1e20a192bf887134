#ifndef HOP_GROUPS_HPP
#define HOP_GROUPS_HPP

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "hop/weights.hpp"

namespace hop {

/// Point of the 2-torus in 64-bit fixed point: x_i = u_i / 2^64.
///
/// An integer matrix acts on this grid exactly (wrapping multiplication is
/// reduction mod 1), so the iteration is an invertible map of the grid and
/// coordinates never leave [0,1).
struct TorusPoint {
  std::uint64_t u1 = 0, u2 = 0;

  double x1() const;
  double x2() const;
  static TorusPoint from_double(double x1, double x2);
};

/// Point (p1/q, p2/q) with 0 <= p_i < q.
struct RationalPoint {
  std::int64_t p1 = 0, p2 = 0, q = 1;

  bool operator==(const RationalPoint&) const = default;
};

using IntMatrix2 = Eigen::Matrix<std::int64_t, 2, 2>;

struct ToralSystem {
  IntMatrix2 B;
  double shift = 5.0;

  ToralSystem();
  ToralSystem(const IntMatrix2& b, double c);
  static ToralSystem from_spec(const WeightProcessSpec& spec);

  /// Throws ConfigError unless det B = +-1 and |tr B| > 2.
  void validate() const;

  TorusPoint apply(TorusPoint x) const;
  RationalPoint apply(const RationalPoint& x) const;

  /// f(x) = 2 cos(2 pi x1) + 2 cos(2 pi x2) + c
  double f(double x1, double x2) const;
  double f(TorusPoint x) const { return f(x.x1(), x.x2()); }
  double f(const RationalPoint& x) const;
};

/// Haar-random starting point for (seed, trial).
TorusPoint haar_point(std::uint64_t seed, std::uint64_t trial);

/// a_k = f(B^k x0), k = 1..n.
WeightSequence toral_orbit_weights(const ToralSystem& sys, TorusPoint x0, Eigen::Index n);
WeightSequence toral_orbit_weights(const ToralSystem& sys, const RationalPoint& x0,
                                   Eigen::Index n);

/// Smallest P >= 1 with B^P x0 = x0, or 0 if none within max_steps.
std::int64_t orbit_period(const ToralSystem& sys, const RationalPoint& x0,
                          std::int64_t max_steps = 1 << 20);

struct CoboundaryResult {
  double lhs = 0;  // sum of g over even orbit indices
  double rhs = 0;  // sum of g over odd orbit indices
  std::int64_t period = 0;  // B-period of x0
  std::int64_t length = 0;  // number of terms summed (even multiple of period)
  bool distinct = false;
};

/// Compares the sums of g = log|f| over the even and odd positions of the
/// periodic B-orbit of x0. Odd periods are doubled so both sums run over a
/// full period of B^2. Throws ConfigError if x0 is not periodic.
CoboundaryResult coboundary_check(const ToralSystem& sys, const RationalPoint& x0);

struct LamplighterSpec {
  double p = 0.9;
  /// General lamp group: draws from the lamp-walk spectral measure. When
  /// set, p is ignored.
  WeightSampler lamp;
  std::string lamp_name;
};

/// Z_2 wr Z gives the two-point process on {1, 2p-1}; a lamp sampler gives
/// the corresponding i.i.d. process. p = 1/2 is rejected.
WeightProcessSpec lamplighter_process(const LamplighterSpec& spec, std::uint64_t seed = 0);

}  // namespace hop

#endif  // HOP_GROUPS_HPP
