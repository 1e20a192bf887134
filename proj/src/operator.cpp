#include "hop/operator.hpp"

#include <algorithm>
#include <cmath>

#include "hop/errors.hpp"

namespace hop {

FiniteOperator::FiniteOperator(const WeightSequence& w)
    : a(w.values), loga(w.logs), provenance(w.provenance) {}

namespace {

constexpr int kMaxNudges = 3;

// Returns the pivot count or the 1-based index of the cancelled pivot as a
// negative number.
Eigen::Index pivot_signs(const FiniteOperator& op, SignedLog x) {
  const SignedLog mx = -x;
  SignedLog d = mx;  // d_1 = -x
  Eigen::Index neg = d.sign < 0;
  for (Eigen::Index k = 1; k < op.dimension(); ++k) {
    if (op.a[k - 1] == 0) {
      d = mx;
    } else {
      // d_k = -x - a_{k-1}^2 / d_{k-1}
      SignedLog t{-d.sign, 2 * op.loga[k - 1] - d.logmag};
      auto s = add(mx, t);
      if (s.cancelled) return -(k + 1);
      d = s.value;
    }
    neg += d.sign < 0;
  }
  return neg;
}

}  // namespace

NegCount negcount(const FiniteOperator& op, SignedLog x) {
  NegCount r;
  r.x_used = x;
  if (x.is_infinite()) {
    r.count = x.sign > 0 ? op.dimension() : 0;
    return r;
  }
  if (x.is_zero()) throw SpectralCollision("negcount (x = 0)", 1);
  if (std::isnan(x.logmag)) throw ConfigError("negcount: x is NaN");
  Eigen::Index last = 0;
  for (int attempt = 0; attempt <= kMaxNudges; ++attempt) {
    Eigen::Index c = pivot_signs(op, r.x_used);
    if (c >= 0) {
      r.count = c;
      return r;
    }
    last = -c;
    if (attempt == kMaxNudges) break;
    r.x_used.logmag += 16 * kCancellationTol * std::pow(4.0, attempt);
    ++r.nudges;
  }
  throw SpectralCollision("negcount pivot", last);
}

NegCount negcount(const FiniteOperator& op, double x) {
  if (std::isnan(x)) throw ConfigError("negcount: x is NaN");
  if (std::isinf(x)) return negcount(op, SignedLog::infinity(x > 0 ? 1 : -1));
  return negcount(op, SignedLog::from_value(x));
}

WindowCount count_in_window(const FiniteOperator& op, SignedLog lambda) {
  if (op.n() % 2 == 0)
    throw ConfigError("count_in_window: even n is unsupported (odd n only)");
  if (lambda.sign <= 0) throw ConfigError("count_in_window: lambda must be positive");
  NegCount c = negcount(op, lambda);
  WindowCount w;
  w.positive = c.count - (op.n() + 1) / 2;
  w.window = 2 * w.positive;
  w.nudges = c.nudges;
  if (w.positive < 0)
    throw InvariantViolation("count_in_window: fewer than (n+1)/2 eigenvalues below lambda");
  return w;
}

std::vector<double> eigenvalues_oracle(const FiniteOperator& op) {
  if (op.n() > 64) throw ConfigError("eigenvalues_oracle: n must be <= 64");
  const double amax = op.n() > 0 ? op.a.abs().maxCoeff() : 0.0;
  // Asymmetric bracket keeps bisection midpoints off structured points like 0.
  const double lo0 = -2 * amax - 1.0, hi0 = 2 * amax + 1.0 + 1.0 / 3.0;
  std::vector<double> out;
  out.reserve(op.dimension());
  for (Eigen::Index j = 1; j <= op.dimension(); ++j) {
    double lo = lo0, hi = hi0;  // negcount(lo) < j <= negcount(hi)
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double probe = mid == 0 ? 1e-300 : mid;
      if (negcount(op, probe).count >= j)
        hi = mid;
      else
        lo = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

FiniteOperator cut_edge(const FiniteOperator& op, Eigen::Index k) {
  if (k < 1 || k > op.n()) throw ConfigError("cut_edge: k out of range");
  FiniteOperator c = op;
  c.a[k - 1] = 0;
  c.loga[k - 1] = -std::numeric_limits<double>::infinity();
  return c;
}

Eigen::Index kolmogorov_count(const std::vector<double>& e1, const std::vector<double>& e2,
                              double tol) {
  if (e1.size() != e2.size())
    throw ConfigError("kolmogorov_distance: inputs have different lengths");
  double scale = 1;
  for (double x : e1) scale = std::max(scale, std::abs(x));
  for (double x : e2) scale = std::max(scale, std::abs(x));
  const double gap = tol * scale;
  std::size_t i = 0, j = 0;
  Eigen::Index best = 0;
  while (i < e1.size() || j < e2.size()) {
    double x;
    if (j == e2.size() || (i < e1.size() && e1[i] <= e2[j]))
      x = e1[i];
    else
      x = e2[j];
    // Atoms closer than the gap are one location; extend the cluster greedily.
    while (true) {
      bool moved = false;
      while (i < e1.size() && e1[i] <= x + gap) x = std::max(x, e1[i++]), moved = true;
      while (j < e2.size() && e2[j] <= x + gap) x = std::max(x, e2[j++]), moved = true;
      if (!moved) break;
    }
    best = std::max<Eigen::Index>(best, std::abs(static_cast<Eigen::Index>(i) -
                                                 static_cast<Eigen::Index>(j)));
  }
  return best;
}

double kolmogorov_distance(const std::vector<double>& e1, const std::vector<double>& e2,
                           double tol) {
  const Eigen::Index c = kolmogorov_count(e1, e2, tol);
  return e1.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(e1.size());
}

}  // namespace hop
