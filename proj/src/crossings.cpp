#include "hop/crossings.hpp"

#include <cmath>
#include <ostream>

#include "hop/errors.hpp"
#include "hop/operator.hpp"

namespace hop {

namespace {

// Calls on_cross(k, is_down) at every crossing.
template <typename F>
void scan(PathRef X, double alpha, F&& on_cross) {
  if (!(alpha > 0)) throw ConfigError("crossings: alpha must be positive");
  if (X.size() == 0) return;
  bool seeking_down = true;
  double ext = X[0];  // running max (seeking down) or min (seeking up)
  for (Eigen::Index k = 1; k < X.size(); ++k) {
    const double x = X[k];
    if (seeking_down) {
      if (x > ext) ext = x;
      if (ext - x >= alpha) {
        on_cross(k, true);
        seeking_down = false;
        ext = x;
      }
    } else {
      if (x < ext) ext = x;
      if (ext - x <= -alpha) {
        on_cross(k, false);
        seeking_down = true;
        ext = x;
      }
    }
  }
}

}  // namespace

CrossingReport crossings(PathRef X, double alpha) {
  CrossingReport r;
  r.alpha = alpha;
  scan(X, alpha, [&](Eigen::Index k, bool down) { (down ? r.down : r.up).push_back(k); });
  r.D = static_cast<Eigen::Index>(r.down.size());
  r.U = static_cast<Eigen::Index>(r.up.size());
  r.C = r.D + r.U;
  return r;
}

CrossingCounts count_crossings(PathRef X, double alpha) {
  CrossingCounts c;
  scan(X, alpha, [&](Eigen::Index, bool down) { ++(down ? c.D : c.U); });
  return c;
}

std::vector<Well> wells(PathRef X, double s) {
  const CrossingReport r = crossings(X, s);
  const Eigen::Index T = X.size() - 1;
  std::vector<Well> out;
  Eigen::Index prev_up = 0;  // tau_{2i-2}
  for (std::size_t i = 0; i < r.down.size(); ++i) {
    const Eigen::Index td = r.down[i];
    const bool has_up = i < r.up.size();
    const Eigen::Index end = has_up ? r.up[i] : T;
    const double Mi = X.segment(prev_up, td - prev_up + 1).maxCoeff();
    const double level = has_up ? std::min(X[end], Mi) : Mi;
    Eigen::Index tmin = td;
    for (Eigen::Index k = td; k <= end; ++k)
      if (X[k] < X[tmin]) tmin = k;
    Eigen::Index a = tmin;
    while (a > 0 && X[a] < level) --a;
    Eigen::Index b = tmin;
    while (b < T && X[b] < level) ++b;
    out.push_back({a, b, level, level - X[tmin]});
    if (has_up) prev_up = r.up[i];
  }
  if (static_cast<Eigen::Index>(out.size()) != r.D)
    throw InvariantViolation("wells: well count differs from downcrossing count");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].a < out[i - 1].b)
      throw InvariantViolation("wells: constructed wells overlap");
  return out;
}

std::vector<SurfacePoint> crossing_process(PathRef X, double alpha) {
  std::vector<SurfacePoint> Z;
  Z.reserve(static_cast<std::size_t>(X.size()));
  if (X.size() == 0) return Z;
  std::int64_t comp = 1;
  double ext = X[0];
  Z.push_back({1, -X[0] + alpha / 2});
  for (Eigen::Index k = 1; k < X.size(); ++k) {
    const double x = X[k];
    if (comp % 2 == 1) {
      if (x > ext) ext = x;
      if (ext - x >= alpha) {
        ++comp;
        ext = x;
      }
    } else {
      if (x < ext) ext = x;
      if (ext - x <= -alpha) {
        ++comp;
        ext = x;
      }
    }
    Z.push_back({comp, comp % 2 == 1 ? -ext + alpha / 2 : -ext - alpha / 2});
  }
  return Z;
}

Eigen::Index big_weight_count(const WeightSequence& w, double delta, SignedLog lambda,
                              BigWeightRule rule) {
  if (!(delta > 0)) throw ConfigError("big_weight_count: delta must be positive");
  if (lambda.sign <= 0) throw ConfigError("big_weight_count: lambda must be positive");
  const double c = rule == BigWeightRule::DeltaOver8 ? 8.0 : 16.0;
  const double thr = delta / c * std::abs(lambda.logmag);
  return (w.logs.abs() > thr).count();
}

namespace {

Eigen::Index ceil_half(Eigen::Index j) { return (j + 1) / 2; }

}  // namespace

SandwichReport check_sandwich(const WeightSequence& w, SignedLog lambda, double delta) {
  if (!(delta > 0 && delta < 1)) throw ConfigError("check_sandwich: delta must lie in (0,1)");
  if (w.size() % 2 == 0) throw ConfigError("check_sandwich: n must be odd");
  if (lambda.sign <= 0) throw ConfigError("check_sandwich: lambda must be positive");
  SandwichReport r;
  r.delta = delta;
  r.log_lambda = lambda.logmag;
  r.n = w.size();
  const double L = std::abs(lambda.logmag);
  const double n = static_cast<double>(w.size());

  r.M = count_in_window(FiniteOperator(w), lambda).positive;
  r.J = jump_count(w, lambda).jumps;
  r.counts_agree = ceil_half(r.J) == r.M;

  const Walk walk = log_ratio_walk(w);
  r.D_plus = count_crossings(walk.S, 2 * (1 + delta) * L).D;
  r.D_minus = count_crossings(walk.S, 2 * (1 - delta) * L).D;
  r.B8 = big_weight_count(w, delta, lambda, BigWeightRule::DeltaOver8);
  r.premise_M = lambda.logmag < (2 / delta) * std::log(delta / (16 * n));
  r.holds_M = r.D_plus - 2 * r.B8 <= r.M && r.M <= r.D_minus + 2 * r.B8;

  // Jumps happen at the (n+1)/2 steps; the last one sees S_{(n-1)/2}.
  const PathRef S = walk.S;
  r.C_plus = count_crossings(S, (2 + delta) * L).C();
  r.C_minus = count_crossings(S, (2 - delta) * L).C();
  r.B16 = big_weight_count(w, delta, lambda, BigWeightRule::DeltaOver16);
  r.premise_upper = lambda.logmag < (4 / delta) * std::log(delta / (32 * n));
  r.premise_lower = lambda.logmag < 0;
  r.holds_upper = r.J <= r.C_minus + 2 * r.B16;
  r.holds_lower = r.C_plus - 2 * r.B16 <= r.J;
  return r;
}

ProcessSandwich process_sandwich(const WeightSequence& w, SignedLog lambda, double delta) {
  if (!(delta > 0 && delta < 2)) throw ConfigError("process_sandwich: delta must lie in (0,2)");
  if (lambda.sign <= 0 || !(lambda.logmag < 0))
    throw ConfigError("process_sandwich: lambda must lie in (0,1)");
  ProcessSandwich r;
  const double L = std::abs(lambda.logmag);
  const double n = static_cast<double>(w.size());
  r.premise_ok = big_weight_count(w, delta, lambda, BigWeightRule::DeltaOver16) == 0 &&
                 lambda.logmag < (4 / delta) * std::log(delta / (32 * n)) &&
                 lambda.logmag < (2 / delta) * std::log(1.0 / 3.0);

  const auto traj = scaled_trajectory(w, lambda);
  const Eigen::Index steps = static_cast<Eigen::Index>(traj.size()) - 1;
  Eigen::ArrayXd X(steps);
  for (Eigen::Index k = 0; k < steps; ++k) X[k] = traj[k].S / L;
  const auto zp = crossing_process(X, 2 + delta);
  const auto zm = crossing_process(X, 2 - delta);
  for (Eigen::Index k = 0; k < steps; ++k) {
    const SurfacePoint y{traj[k + 1].component, traj[k + 1].Y};
    SurfacePoint wk = zm[k];
    const double shift = delta * static_cast<double>(k) / (4 * n);
    wk.y += wk.component % 2 == 0 ? shift : -shift;
    const bool lo_ok = surface_leq(zp[k], y);
    const bool up_ok = surface_leq(y, wk);
    r.lower_violations += !lo_ok;
    r.upper_violations += !up_ok;
    if ((!lo_ok || !up_ok) && r.first_violation < 0) r.first_violation = k;
    ++r.checked;
  }
  return r;
}

void write_crossings_csv(std::ostream& os, const CrossingReport& r) {
  os << "kind,index,time\n";
  for (std::size_t i = 0; i < r.down.size(); ++i) os << "down," << i + 1 << ',' << r.down[i] << '\n';
  for (std::size_t i = 0; i < r.up.size(); ++i) os << "up," << i + 1 << ',' << r.up[i] << '\n';
}

void write_sandwich_csv_header(std::ostream& os) {
  os << "trial,n,delta,log_lambda,M,D_plus,D_minus,B8,premise_M,holds_M,"
        "J,C_plus,C_minus,B16,premise_upper,premise_lower,holds_upper,holds_lower,"
        "counts_agree\n";
}

void write_sandwich_csv_row(std::ostream& os, const SandwichReport& r, std::uint64_t trial) {
  const auto old = os.precision(17);
  os << trial << ',' << r.n << ',' << r.delta << ',' << r.log_lambda << ',' << r.M << ','
     << r.D_plus << ',' << r.D_minus << ',' << r.B8 << ',' << r.premise_M << ',' << r.holds_M
     << ',' << r.J << ',' << r.C_plus << ',' << r.C_minus << ',' << r.B16 << ','
     << r.premise_upper << ',' << r.premise_lower << ',' << r.holds_upper << ','
     << r.holds_lower << ',' << r.counts_agree << '\n';
  os.precision(old);
}

}  // namespace hop
