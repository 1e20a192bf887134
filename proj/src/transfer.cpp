#include "hop/transfer.hpp"

#include <cmath>
#include <ostream>

#include "hop/errors.hpp"

namespace hop {

std::partial_ordering surface_compare(const SurfacePoint& a, const SurfacePoint& b) {
  if (a.component != b.component) return a.component <=> b.component;
  if (a.component % 2 == 0) return a.y <=> b.y;
  return b.y <=> a.y;
}

TransferState TransferState::at(const SurfacePoint& p, SignedLog lambda, double S) {
  TransferState s;
  s.component = p.component;
  s.v = SignedLog::from_log(p.y, p.component % 2 == 0 ? 1 : -1);
  s.lambda = lambda;
  s.S = S;
  return s;
}

TransferState initial_state(SignedLog lambda) {
  if (lambda.sign < 0) throw ConfigError("transfer: lambda must be >= 0");
  TransferState s;
  s.lambda = lambda;
  return s;
}

namespace {

struct Collision {
  std::int64_t step;
};

// Returns false on a cancellation.
bool apply_q(TransferState& s, double loga_odd) {
  if (s.lambda.is_zero()) return true;
  const double ll = s.lambda.logmag;

  // Lower shear on w = 1/v.
  SignedLog w = s.v.is_infinite() ? SignedLog::zero() : s.v.reciprocal();
  SignedLog l{-1, ll + s.S};
  auto wl = add(w, l);
  if (wl.cancelled) return false;
  SignedLog v = wl.value.reciprocal();
  if (v.sign != s.v.sign) ++s.component;

  // Upper shear on v.
  SignedLog u{1, ll - s.S - 2 * loga_odd};
  auto vu = add(v, u);
  if (vu.cancelled) return false;
  if (vu.value.sign != v.sign) ++s.component;
  s.v = vu.value;
  return true;
}

TransferState advance(const TransferState& s, double loga_odd, double loga_even, int sign_odd,
                      int sign_even) {
  TransferState t = s;
  if (!apply_q(t, loga_odd)) throw Collision{s.step};
  t.S = s.S + (2 * loga_odd - 2 * loga_even);
  t.eps = s.eps * sign_odd * sign_even;
  t.step = s.step + 1;
  return t;
}

constexpr int kMaxNudges = 3;

template <typename Visit>
JumpCount run(const WeightSequence& w, SignedLog lambda, Visit&& visit) {
  if (w.size() % 2 == 0) throw ConfigError("transfer: n must be odd");
  if (lambda.sign < 0) throw ConfigError("transfer: lambda must be >= 0");
  const Eigen::Index steps = (w.size() + 1) / 2;
  JumpCount r;
  r.lambda_used = lambda;
  std::int64_t where = 0;
  for (int attempt = 0; attempt <= kMaxNudges; ++attempt) {
    try {
      TransferState s = initial_state(r.lambda_used);
      visit(s, true);
      for (Eigen::Index k = 0; k < steps; ++k) {
        const Eigen::Index io = 2 * k, ie = 2 * k + 1;
        const bool last = ie >= w.size();
        s = advance(s, w.logs[io], last ? 0.0 : w.logs[ie], w.values[io] > 0 ? 1 : -1,
                    last || w.values[ie] > 0 ? 1 : -1);
        visit(s, false);
      }
      r.jumps = s.jumps();
      return r;
    } catch (const Collision& c) {
      where = c.step;
      if (attempt == kMaxNudges) break;
      r.lambda_used.logmag += 16 * kCancellationTol * std::pow(4.0, attempt);
      ++r.nudges;
    }
  }
  throw SpectralCollision("transfer step", where);
}

}  // namespace

TransferState step_pair_log(const TransferState& s, double loga_odd, double loga_even,
                            int sign_odd, int sign_even) {
  try {
    return advance(s, loga_odd, loga_even, sign_odd, sign_even);
  } catch (const Collision& c) {
    throw SpectralCollision("transfer step", c.step);
  }
}

TransferState step_pair(const TransferState& s, double a_odd, double a_even) {
  if (a_odd == 0 || a_even == 0) throw ConfigError("step_pair: weights must be nonzero");
  return step_pair_log(s, std::log(std::abs(a_odd)), std::log(std::abs(a_even)),
                       a_odd > 0 ? 1 : -1, a_even > 0 ? 1 : -1);
}

JumpCount jump_count(const WeightSequence& w, SignedLog lambda) {
  return run(w, lambda, [](const TransferState&, bool) {});
}

std::vector<TrajectoryPoint> scaled_trajectory(const WeightSequence& w, SignedLog lambda) {
  std::vector<TrajectoryPoint> out;
  run(w, lambda, [&](const TransferState& s, bool first) {
    if (first) out.clear();
    const double scale = s.lambda.is_zero() ? 1.0 : std::abs(s.lambda.logmag);
    out.push_back({s.step, s.v.logmag / scale, s.component, s.S});
  });
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& t) {
  os << "k,Y,component,S\n";
  os.precision(17);
  for (const auto& p : t) os << p.k << ',' << p.Y << ',' << p.component << ',' << p.S << '\n';
}

}  // namespace hop
