#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <variant>

#include "rigidity/errors.hpp"

namespace rigidity {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using HighFloat = boost::multiprecision::cpp_bin_float_100;

// Element a + b*sqrt(d) of a real quadratic field, stored exactly.  The
// radicand is kept square-free (we cap it at 10^9 so trial division settles
// that quickly), with d == 0 reserved for plain rationals.  All predicates on
// these values — sign, order, floor — are decided algebraically, never
// through floating point.
class ExactQuadratic {
 public:
  ExactQuadratic() = default;
  ExactQuadratic(Rational rational);  // NOLINT: implicit by design
  ExactQuadratic(long long n) : ExactQuadratic(Rational(n)) {}
  ExactQuadratic(Rational rat, Rational coef, std::uint64_t radicand);

  const Rational& rational_part() const { return a_; }
  const Rational& radical_coefficient() const { return b_; }
  std::uint64_t radicand() const { return d_; }

  bool is_rational() const { return d_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  // -1, 0 or +1; exact.
  int sign() const;

  ExactQuadratic operator-() const;
  ExactQuadratic& operator+=(const ExactQuadratic& o);
  ExactQuadratic& operator-=(const ExactQuadratic& o);
  ExactQuadratic& operator*=(const ExactQuadratic& o);
  ExactQuadratic& operator/=(const ExactQuadratic& o);

  friend ExactQuadratic operator+(ExactQuadratic x, const ExactQuadratic& y) { return x += y; }
  friend ExactQuadratic operator-(ExactQuadratic x, const ExactQuadratic& y) { return x -= y; }
  friend ExactQuadratic operator*(ExactQuadratic x, const ExactQuadratic& y) { return x *= y; }
  friend ExactQuadratic operator/(ExactQuadratic x, const ExactQuadratic& y) { return x /= y; }

  friend bool operator==(const ExactQuadratic& x, const ExactQuadratic& y) { return (x - y).is_zero(); }
  friend bool operator!=(const ExactQuadratic& x, const ExactQuadratic& y) { return !(x == y); }
  friend bool operator<(const ExactQuadratic& x, const ExactQuadratic& y) { return (x - y).sign() < 0; }
  friend bool operator<=(const ExactQuadratic& x, const ExactQuadratic& y) { return (x - y).sign() <= 0; }
  friend bool operator>(const ExactQuadratic& x, const ExactQuadratic& y) { return (x - y).sign() > 0; }
  friend bool operator>=(const ExactQuadratic& x, const ExactQuadratic& y) { return (x - y).sign() >= 0; }

  HighFloat high_value() const;
  double approx() const;

  // Parseable textual form: "3", "-7/2", "1/8*sqrt2", "3-2*sqrt2".
  std::string str() const;

 private:
  void normalise();

  Rational a_ = 0;
  Rational b_ = 0;
  std::uint64_t d_ = 0;
};

// Exact integer floor and fractional part.
BigInt floor_int(const ExactQuadratic& x);
ExactQuadratic frac(const ExactQuadratic& x);

// Exact rational from a decimal literal such as "0.25", "-3", "1e-6",
// "2.5e3", "3/4".
Rational parse_rational(const std::string& text);

// Closed double interval with outward-rounded arithmetic: every operation
// widens its result by one ulp per bound, so the true real-number result is
// always contained.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double l, double h);
  static Interval exactly(double v) { return Interval(v, v); }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }

  friend Interval operator+(const Interval& x, const Interval& y);
  friend Interval operator-(const Interval& x, const Interval& y);
  friend Interval operator-(const Interval& x);
  Interval scaled(long long k) const;  // multiplication by an integer
};

// Tight two-ulp enclosure of an exact value.
Interval enclose(const ExactQuadratic& x);

enum class Truth { True, False, Unknown };

// A radius value in a derivation: either exact (quadratic-field element) or a
// certified double enclosure.  Order predicates are three-valued; engines
// that need certainty must handle Unknown explicitly.
class Scalar {
 public:
  Scalar() : v_(ExactQuadratic()) {}
  Scalar(ExactQuadratic e) : v_(std::move(e)) {}  // NOLINT: implicit by design
  Scalar(Interval i) : v_(i) {}                   // NOLINT: implicit by design

  bool is_exact() const { return std::holds_alternative<ExactQuadratic>(v_); }
  const ExactQuadratic& exact() const;
  const Interval& interval() const;

  Interval enclosure() const;
  double approx() const { return enclosure().mid(); }
  std::string str() const;

  // Grammar: exact quadratic expression ("2", "3/4", "0.25", "sqrt2",
  // "1+2*sqrt2", "sqrt2/8", "5*sqrt2-7", "1e-6").
  static Scalar parse(const std::string& text);

 private:
  std::variant<ExactQuadratic, Interval> v_;
};

Truth scalar_less(const Scalar& x, const Scalar& y);
Truth scalar_less_equal(const Scalar& x, const Scalar& y);
inline Truth scalar_greater(const Scalar& x, const Scalar& y) { return scalar_less(y, x); }
inline Truth scalar_positive(const Scalar& x) { return scalar_less(Scalar(ExactQuadratic(0)), x); }

// Exact difference when both sides are exact, interval difference otherwise.
Scalar scalar_sub(const Scalar& x, const Scalar& y);
Scalar scalar_add(const Scalar& x, const Scalar& y);
Scalar scalar_scale(const Scalar& x, long long k);

}  // namespace rigidity
