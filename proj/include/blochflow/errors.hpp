#pragma once

#include <stdexcept>
#include <string>

namespace blochflow {

/// Raised when an affine channel's linear part is (numerically) rank deficient.
class SingularChannel : public std::runtime_error {
 public:
  explicit SingularChannel(double smallest_singular_value)
      : std::runtime_error("singular channel: smallest singular value " +
                           std::to_string(smallest_singular_value)),
        smallest_singular_value_(smallest_singular_value) {}

  double smallest_singular_value() const noexcept { return smallest_singular_value_; }

 private:
  double smallest_singular_value_;
};

class UndeterminedClassification : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonUnitalInput : public std::invalid_argument {
 public:
  NonUnitalInput(double translation_norm, double t)
      : std::invalid_argument("family is not unital: |c| = " + std::to_string(translation_norm) +
                              " at t = " + std::to_string(t)),
        translation_norm_(translation_norm) {}

  double translation_norm() const noexcept { return translation_norm_; }

 private:
  double translation_norm_;
};

}  // namespace blochflow
