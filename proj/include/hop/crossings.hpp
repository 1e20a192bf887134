#ifndef HOP_CROSSINGS_HPP
#define HOP_CROSSINGS_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "hop/signed_log.hpp"
#include "hop/transfer.hpp"
#include "hop/weights.hpp"

namespace hop {

using PathRef = Eigen::Ref<const Eigen::ArrayXd>;

/// Index interval [a, b] of a path.
struct Well {
  Eigen::Index a = 0, b = 0;
  double level = 0;  // the level the well dips below and returns to
  double depth = 0;  // level - min over the well
};

struct CrossingReport {
  double alpha = 0;
  std::vector<Eigen::Index> down;  // tau_1, tau_3, ...
  std::vector<Eigen::Index> up;    // tau_2, tau_4, ...
  Eigen::Index D = 0, U = 0, C = 0;
};

/// alpha-crossings of the sampled path X (X[0] is time 0), one pass.
/// A downcrossing happens at the first s with M - X(s) >= alpha, M the
/// running max since the previous crossing; upcrossings mirror this with
/// the running min.
CrossingReport crossings(PathRef X, double alpha);

/// Down/up counts only, no allocation.
struct CrossingCounts {
  Eigen::Index D = 0, U = 0;
  Eigen::Index C() const { return D + U; }
};
CrossingCounts count_crossings(PathRef X, double alpha);

/// Maximal disjoint s-wells, one per s-downcrossing. Throws
/// InvariantViolation if the construction disagrees with the crossing count.
std::vector<Well> wells(PathRef X, double s);

/// The alpha-crossing process Z^alpha at k = 0..X.size()-1 on the surface.
std::vector<SurfacePoint> crossing_process(PathRef X, double alpha);

enum class BigWeightRule { DeltaOver8, DeltaOver16 };

/// #{k : |log|a_k|| > c delta |log lambda|}, c = 1/8 or 1/16.
Eigen::Index big_weight_count(const WeightSequence& w, double delta, SignedLog lambda,
                              BigWeightRule rule = BigWeightRule::DeltaOver8);

struct SandwichReport {
  double delta = 0;
  double log_lambda = 0;
  Eigen::Index n = 0;

  // Eigenvalue level: D counts downcrossings of S/2 at (1 +- delta)|log lambda|.
  Eigen::Index M = 0;
  Eigen::Index D_plus = 0, D_minus = 0;
  Eigen::Index B8 = 0;
  bool premise_M = false;  // lambda < (delta / 16n)^(2/delta)
  bool holds_M = false;

  // Jump level: C counts crossings of S at (2 +- delta)|log lambda|.
  Eigen::Index J = 0;
  Eigen::Index C_plus = 0, C_minus = 0;
  Eigen::Index B16 = 0;
  bool premise_upper = false;  // lambda < (delta / 32n)^(4/delta)
  bool premise_lower = false;  // lambda < 1
  bool holds_upper = false;    // J <= C_minus + 2 B16
  bool holds_lower = false;    // C_plus - 2 B16 <= J

  bool counts_agree = false;  // ceil(J/2) == M

  bool premise_ok() const { return premise_M; }
  /// Every inequality whose premise holds is satisfied.
  bool holds() const {
    return (!premise_M || holds_M) && (!premise_upper || holds_upper) &&
           (!premise_lower || holds_lower) && counts_agree;
  }
};

/// Evaluates both sandwiches. delta must lie in (0,1) and n must be odd.
SandwichReport check_sandwich(const WeightSequence& w, SignedLog lambda, double delta);

struct ProcessSandwich {
  bool premise_ok = false;  // no big weights at delta/16 and the jump-level premises
  Eigen::Index checked = 0;
  Eigen::Index lower_violations = 0;  // Z^{2+delta}_k <=_A Y_{k+1} fails
  Eigen::Index upper_violations = 0;  // Y_{k+1} <=_A W_k fails
  Eigen::Index first_violation = -1;
};

/// Pointwise comparison of the scaled transfer trajectory Y with the
/// crossing processes of X = S / |log lambda|:
///   Z^{2+delta}_k <=_A Y_{k+1} <=_A W_k,
/// where W_k is Z^{2-delta}_k moved delta k/(4n) forward inside its component.
ProcessSandwich process_sandwich(const WeightSequence& w, SignedLog lambda, double delta);

/// CSV with header kind,index,time.
void write_crossings_csv(std::ostream& os, const CrossingReport& r);

/// CSV, one row per report; columns documented in README.
void write_sandwich_csv_header(std::ostream& os);
void write_sandwich_csv_row(std::ostream& os, const SandwichReport& r, std::uint64_t trial);

}  // namespace hop

#endif  // HOP_CROSSINGS_HPP
