#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "rigidity/errors.hpp"

namespace rigidity {

// A nonnegative radius bound that may be infinite.  Kept as an explicit flag
// rather than an IEEE infinity so that "finite" paths never see a non-finite
// double by accident.
class ExtendedReal {
 public:
  ExtendedReal() : value_(0.0), infinite_(false) {}
  explicit ExtendedReal(double v) : value_(v), infinite_(false) {
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "finite ExtendedReal constructed from non-finite double");
  }
  static ExtendedReal infinity() {
    ExtendedReal e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  // Finite value; calling this on the infinite element is a programming error.
  double finite_value() const {
    if (infinite_) fail(ErrorKind::Internal, "finite_value() on infinite ExtendedReal");
    return value_;
  }

  ExtendedReal half() const {
    if (infinite_) return *this;
    return ExtendedReal(value_ / 2.0);
  }

  friend bool operator<(double a, const ExtendedReal& b) { return b.infinite_ || a < b.value_; }
  friend bool operator<=(double a, const ExtendedReal& b) { return b.infinite_ || a <= b.value_; }
  friend bool operator<(const ExtendedReal& a, double b) { return !a.infinite_ && a.value_ < b; }
  friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.value_ <= b.value_;
  }

  // Clamps an infinite bound to a finite stand-in for sampling loops; finite
  // bounds are returned as-is.
  double finite_or(double fallback) const { return infinite_ ? fallback : value_; }

  std::string str() const;

 private:
  double value_;
  bool infinite_;
};

inline std::string ExtendedReal::str() const { return infinite_ ? "inf" : std::to_string(value_); }

}  // namespace rigidity
