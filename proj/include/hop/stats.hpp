#ifndef HOP_STATS_HPP
#define HOP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Core>

namespace hop {

struct Estimate {
  double mean = 0;
  double std_error = 0;
  std::int64_t trials = 0;
};

template <typename Container>
Estimate mean_stderr(const Container& xs) {
  Estimate e;
  e.trials = static_cast<std::int64_t>(std::size(xs));
  if (e.trials == 0) return e;
  double s = 0;
  for (double x : xs) s += x;
  e.mean = s / e.trials;
  if (e.trials > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (e.trials - 1) / e.trials);
  }
  return e;
}

/// sup_x |F_n(x) - F(x)| for a sample against a continuous CDF.
inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

/// Histogram of nonnegative integer outcomes as probabilities.
using IntLaw = std::map<std::int64_t, double>;

template <typename Container>
IntLaw int_law(const Container& xs) {
  IntLaw law;
  for (auto x : xs) law[static_cast<std::int64_t>(x)] += 1.0;
  for (auto& [k, v] : law) v /= static_cast<double>(std::size(xs));
  return law;
}

inline double tv_distance(const IntLaw& p, const IntLaw& q) {
  double d = 0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    d += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) d += v;
  return 0.5 * d;
}

struct LinearFit {
  double slope = 0, intercept = 0;
  double slope_stderr = 0;
};

/// Ordinary least squares y = intercept + slope x, optionally weighted.
inline LinearFit linear_fit(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y,
                            const Eigen::ArrayXd& w = Eigen::ArrayXd()) {
  const Eigen::ArrayXd wt = w.size() == x.size() ? w : Eigen::ArrayXd::Ones(x.size());
  const double sw = wt.sum();
  const double mx = (wt * x).sum() / sw, my = (wt * y).sum() / sw;
  const double sxx = (wt * (x - mx).square()).sum();
  const double sxy = (wt * (x - mx) * (y - my)).sum();
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    const Eigen::ArrayXd r = y - f.intercept - f.slope * x;
    const double s2 = (wt * r.square()).sum() / sw * x.size() / (x.size() - 2);
    f.slope_stderr = std::sqrt(s2 / (sxx / sw * x.size()));
  }
  return f;
}

}  // namespace hop

#endif  // HOP_STATS_HPP
