#ifndef HOP_ERRORS_HPP
#define HOP_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hop {

/// Invalid process specification or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pivot or shear cancelled to within tolerance and nudging the spectral
/// parameter did not resolve it.
class SpectralCollision : public std::runtime_error {
 public:
  SpectralCollision(const std::string& where, std::int64_t index)
      : std::runtime_error("spectral collision in " + where + " at index " +
                           std::to_string(index)),
        index_(index) {}
  std::int64_t index() const { return index_; }

 private:
  std::int64_t index_;
};

/// A checked mathematical invariant failed (e.g. transfer and Sturm counts
/// disagree, or an eigenvalue sandwich is violated).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  InvariantViolation(const std::string& what, std::vector<double> weights, std::string origin)
      : std::runtime_error(what), weights_(std::move(weights)), origin_(std::move(origin)) {}

  /// The offending weight sequence, if the thrower had one.
  const std::vector<double>& weights() const { return weights_; }
  const std::string& origin() const { return origin_; }

 private:
  std::vector<double> weights_;
  std::string origin_;
};

}  // namespace hop

#endif  // HOP_ERRORS_HPP
