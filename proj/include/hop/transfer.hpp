#ifndef HOP_TRANSFER_HPP
#define HOP_TRANSFER_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hop/signed_log.hpp"
#include "hop/weights.hpp"

namespace hop {

/// A point of the surface A: a component index and a log coordinate y.
/// Even components hold log v for v >= 0, odd components log|v| for v <= 0.
/// y may be scaled by any positive constant; the order does not change.
struct SurfacePoint {
  std::int64_t component = 1;
  double y = std::numeric_limits<double>::infinity();
};

/// The order of A: higher components are larger; inside an even component
/// larger y is larger, inside an odd one the order is reversed.
std::partial_ordering surface_compare(const SurfacePoint& a, const SurfacePoint& b);
inline bool surface_leq(const SurfacePoint& a, const SurfacePoint& b) {
  auto c = surface_compare(a, b);
  return c == std::partial_ordering::less || c == std::partial_ordering::equivalent;
}

struct TransferState {
  std::int64_t component = 1;
  SignedLog v = SignedLog::infinity(-1);  // v_0 = infinity, approached from A_1
  std::int64_t step = 0;
  double S = 0;   // S_k
  int eps = 1;    // product of the signs of the consumed weights
  SignedLog lambda;

  std::int64_t jumps() const { return component - 1; }
  SurfacePoint point() const { return {component, v.logmag}; }

  /// State at a given surface point (y = log|v|, unscaled).
  static TransferState at(const SurfacePoint& p, SignedLog lambda, double S = 0);
};

TransferState initial_state(SignedLog lambda);

/// Applies Q_k = Upper(u) Lower(l) to v, one shear at a time:
/// Lower maps 1/v to 1/v + l with l = -lambda e^{S_k}; Upper maps v to
/// v + u with u = lambda e^{-S_k} / a_odd^2. Each sign change of v advances
/// the component. Then S_{k+1} = S_k + 2 log|a_odd / a_even|.
/// Throws SpectralCollision on an exact cancellation.
TransferState step_pair(const TransferState& s, double a_odd, double a_even);
TransferState step_pair_log(const TransferState& s, double loga_odd, double loga_even,
                            int sign_odd = 1, int sign_even = 1);

struct JumpCount {
  std::int64_t jumps = 0;
  int nudges = 0;
  SignedLog lambda_used;
};

/// Total component advances over the (n+1)/2 steps for odd n, starting at
/// v_0 = infinity. A collision nudges lambda as negcount does.
JumpCount jump_count(const WeightSequence& w, SignedLog lambda);

struct TrajectoryPoint {
  std::int64_t k = 0;
  double Y = 0;  // log|v_k| / |log lambda|
  std::int64_t component = 1;
  double S = 0;  // S_k
};

/// Points k = 0..(n+1)/2 of the same run as jump_count.
std::vector<TrajectoryPoint> scaled_trajectory(const WeightSequence& w, SignedLog lambda);

/// CSV with header k,Y,component,S.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& t);

}  // namespace hop

#endif  // HOP_TRANSFER_HPP
