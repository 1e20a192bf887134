// Independent reference computations used only by the tests.
#ifndef HOP_TESTS_ORACLES_HPP
#define HOP_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

// Spectrum of the zero-diagonal tridiagonal matrix with off-diagonal a, via Eigen.
inline std::vector<double> tridiagonal_spectrum(const Eigen::ArrayXd& a) {
  const Eigen::Index n = a.size() + 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub = a.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Same spectrum through a dense symmetric matrix, for small n.
inline std::vector<double> dense_spectrum(const Eigen::ArrayXd& a) {
  const Eigen::Index n = a.size() + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) H(i, i + 1) = H(i + 1, i) = a[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline long count_below(const std::vector<double>& ev, double x) {
  return std::count_if(ev.begin(), ev.end(), [x](double e) { return e < x; });
}

inline long count_in(const std::vector<double>& ev, double lo, double hi) {
  return std::count_if(ev.begin(), ev.end(), [&](double e) { return e > lo && e < hi; });
}

// Path graph on n vertices: 2 cos(k pi / (n + 1)), k = 1..n.
inline std::vector<double> path_spectrum(long vertices) {
  std::vector<double> ev;
  for (long k = 1; k <= vertices; ++k) ev.push_back(2 * std::cos(M_PI * double(k) / double(vertices + 1)));
  std::sort(ev.begin(), ev.end());
  return ev;
}

struct Crossings {
  std::vector<long> down, up;
};

// Quadratic-time crossing times: each step recomputes the running extremum
// since the previous crossing from scratch.
inline Crossings brute_crossings(const Eigen::ArrayXd& X, double alpha) {
  Crossings c;
  long start = 0;
  bool seeking_down = true;
  for (long k = 1; k < X.size(); ++k) {
    double ext = X[start];
    for (long j = start; j <= k; ++j) ext = seeking_down ? std::max(ext, X[j]) : std::min(ext, X[j]);
    if (seeking_down && ext - X[k] >= alpha) {
      c.down.push_back(k);
      seeking_down = false;
      start = k;
    } else if (!seeking_down && X[k] - ext >= alpha) {
      c.up.push_back(k);
      seeking_down = true;
      start = k;
    }
  }
  return c;
}

// Largest gap between two empirical CDFs, counted in eigenvalues, probed at
// midpoints of gaps wider than tol * scale in the merged spectrum.
inline long cdf_gap(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-10) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  std::sort(pts.begin(), pts.end());
  double scale = 1;
  for (double x : pts) scale = std::max(scale, std::abs(x));
  long gap = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] <= tol * scale) continue;
    const double x = 0.5 * (pts[i] + pts[i + 1]);
    gap = std::max(gap, std::labs(count_below(a, x) - count_below(b, x)));
  }
  return gap;
}

}  // namespace oracle

#endif  // HOP_TESTS_ORACLES_HPP
