#include "rigidity/exact.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace rigidity {

namespace {

constexpr std::uint64_t kMaxRadicand = 1000000000ULL;  // keeps square-free reduction trivial

// Exact floor of a rational (cpp_int division truncates toward zero).
BigInt rational_floor(const Rational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);  // always > 0
  BigInt t = num / den;
  if (num < 0 && t * den != num) --t;
  return t;
}

double bump_down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
double bump_up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

// cpp_int's string constructor treats a leading 0 as an octal marker, so
// integers are parsed here digit by digit.
BigInt parse_integer(const std::string& text) {
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
  if (i == text.size()) fail(ErrorKind::Parameter, "malformed integer '" + text + "'");
  BigInt v = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) fail(ErrorKind::Parameter, "malformed integer '" + text + "'");
    v = v * 10 + (text[i] - '0');
  }
  return neg ? -v : v;
}

}  // namespace

ExactQuadratic::ExactQuadratic(Rational rational) : a_(std::move(rational)), b_(0), d_(0) {}

ExactQuadratic::ExactQuadratic(Rational rat, Rational coef, std::uint64_t radicand)
    : a_(std::move(rat)), b_(std::move(coef)), d_(radicand) {
  if (d_ > kMaxRadicand) fail(ErrorKind::Parameter, "radicand exceeds the supported bound 10^9");
  normalise();
}

void ExactQuadratic::normalise() {
  if (b_ == 0 || d_ == 0) {
    b_ = 0;
    d_ = 0;
    return;
  }
  // pull square factors out of the radicand: b*sqrt(f^2 m) = (b f)*sqrt(m)
  for (std::uint64_t f = 2; f * f <= d_; ++f) {
    while (d_ % (f * f) == 0) {
      d_ /= f * f;
      b_ *= f;
    }
  }
  if (d_ == 1) {
    a_ += b_;
    b_ = 0;
    d_ = 0;
  }
}

int ExactQuadratic::sign() const {
  int sa = a_.sign(), sb = b_.sign();
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // opposite signs: compare a^2 against b^2 d; the larger magnitude wins
  Rational lhs = a_ * a_;
  Rational rhs = b_ * b_ * Rational(d_);
  if (lhs == rhs) return 0;  // cannot happen for square-free d >= 2, kept for safety
  bool rational_dominates = lhs > rhs;
  return rational_dominates ? sa : sb;
}

ExactQuadratic ExactQuadratic::operator-() const {
  ExactQuadratic r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

ExactQuadratic& ExactQuadratic::operator+=(const ExactQuadratic& o) {
  if (d_ != 0 && o.d_ != 0 && d_ != o.d_)
    fail(ErrorKind::Parameter, "values live in different quadratic fields (radicands " + std::to_string(d_) + " and " +
                                   std::to_string(o.d_) + ")");
  a_ += o.a_;
  b_ += o.b_;
  if (d_ == 0) d_ = o.d_;
  normalise();
  return *this;
}

ExactQuadratic& ExactQuadratic::operator-=(const ExactQuadratic& o) { return *this += -o; }

ExactQuadratic& ExactQuadratic::operator*=(const ExactQuadratic& o) {
  if (d_ != 0 && o.d_ != 0 && d_ != o.d_)
    fail(ErrorKind::Parameter, "values live in different quadratic fields (radicands " + std::to_string(d_) + " and " +
                                   std::to_string(o.d_) + ")");
  std::uint64_t d = d_ != 0 ? d_ : o.d_;
  Rational na = a_ * o.a_ + b_ * o.b_ * Rational(d);
  Rational nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  d_ = d;
  normalise();
  return *this;
}

ExactQuadratic& ExactQuadratic::operator/=(const ExactQuadratic& o) {
  if (o.is_zero()) fail(ErrorKind::Parameter, "division by zero");
  // multiply by the conjugate: 1/(a + b sqrt d) = (a - b sqrt d)/(a^2 - b^2 d)
  Rational denom = o.a_ * o.a_ - o.b_ * o.b_ * Rational(o.d_);
  ExactQuadratic conj = o;
  conj.b_ = -conj.b_;
  *this *= conj;
  a_ /= denom;
  b_ /= denom;
  return *this;
}

HighFloat ExactQuadratic::high_value() const {
  HighFloat v = static_cast<HighFloat>(a_);
  if (b_ != 0) v += static_cast<HighFloat>(b_) * sqrt(HighFloat(d_));
  return v;
}

double ExactQuadratic::approx() const { return high_value().convert_to<double>(); }

std::string ExactQuadratic::str() const {
  auto rat = [](const Rational& q) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(q);
    if (boost::multiprecision::denominator(q) != 1) os << "/" << boost::multiprecision::denominator(q);
    return os.str();
  };
  if (is_rational()) return rat(a_);
  std::string out;
  if (a_ != 0) out = rat(a_);
  if (b_ == 1) {
    out += out.empty() ? "" : "+";
  } else if (b_ == -1) {
    out += "-";
  } else {
    if (!out.empty() && b_ > 0) out += "+";
    out += rat(b_) + "*";
  }
  out += "sqrt" + std::to_string(d_);
  return out;
}

BigInt floor_int(const ExactQuadratic& x) {
  if (x.is_rational()) return rational_floor(x.rational_part());
  // First guess from the 100-digit value, then certify and correct with exact
  // integer comparisons; huge coefficients with heavy cancellation cannot fool
  // this, they only cost a few extra doubling steps.
  BigInt k;
  {
    HighFloat f = floor(x.high_value());
    k = f.convert_to<BigInt>();
  }
  auto at_least = [&x](const BigInt& n) { return (x - ExactQuadratic(Rational(n))).sign() >= 0; };
  // establish x < hi by doubling upward, then x >= lo by doubling downward
  BigInt hi = k + 1, step = 1;
  while (at_least(hi)) {
    hi += step;
    step <<= 1;
  }
  BigInt lo = hi - 1;
  step = 1;
  while (!at_least(lo)) {
    lo -= step;
    step <<= 1;
  }
  // invariant: x >= lo and x < hi; narrow to hi - lo == 1
  while (hi - lo > 1) {
    BigInt mid = lo + (hi - lo) / 2;
    if (at_least(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

ExactQuadratic frac(const ExactQuadratic& x) { return x - ExactQuadratic(Rational(floor_int(x))); }

Rational parse_rational(const std::string& text) {
  if (text.empty()) fail(ErrorKind::Parameter, "empty number literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string p = text.substr(0, slash), q = text.substr(slash + 1);
    if (p.empty() || q.empty() || q.find('/') != std::string::npos || p.find('.') != std::string::npos ||
        q.find('.') != std::string::npos)
      fail(ErrorKind::Parameter, "malformed fraction '" + text + "'");
    try {
      Rational r{parse_integer(p), parse_integer(q)};
      return r;
    } catch (const std::exception&) {
      fail(ErrorKind::Parameter, "malformed fraction '" + text + "'");
    }
  }
  // decimal with optional exponent: [-]ddd[.ddd][e[-]ddd]
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
  std::string digits;
  long long scale10 = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) --scale10;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      try {
        std::size_t used = 0;
        long long e = std::stoll(text.substr(i + 1), &used);
        if (used != text.size() - i - 1) fail(ErrorKind::Parameter, "malformed exponent in '" + text + "'");
        scale10 += e;
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        fail(ErrorKind::Parameter, "malformed exponent in '" + text + "'");
      }
      break;
    } else {
      fail(ErrorKind::Parameter, "malformed number literal '" + text + "'");
    }
  }
  if (!seen_digit) fail(ErrorKind::Parameter, "malformed number literal '" + text + "'");
  Rational r{parse_integer(digits)};
  BigInt pow10 = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale10 < 0 ? -scale10 : scale10));
  if (scale10 < 0)
    r /= Rational(pow10);
  else
    r *= Rational(pow10);
  if (neg) r = -r;
  return r;
}

Interval::Interval(double l, double h) : lo(l), hi(h) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi)
    fail(ErrorKind::Parameter, "malformed interval [" + std::to_string(l) + ", " + std::to_string(h) + "]");
}

Interval operator+(const Interval& x, const Interval& y) { return Interval(bump_down(x.lo + y.lo), bump_up(x.hi + y.hi)); }

Interval operator-(const Interval& x, const Interval& y) { return Interval(bump_down(x.lo - y.hi), bump_up(x.hi - y.lo)); }

Interval operator-(const Interval& x) { return Interval(-x.hi, -x.lo); }

Interval Interval::scaled(long long k) const {
  double a = lo * static_cast<double>(k), b = hi * static_cast<double>(k);
  if (k < 0) std::swap(a, b);
  if (k == 0) return Interval(0.0, 0.0);
  return Interval(bump_down(a), bump_up(b));
}

Interval enclose(const ExactQuadratic& x) {
  if (x.is_zero()) return Interval(0.0, 0.0);
  double v = x.approx();  // nearest double to a 100-digit evaluation
  return Interval(bump_down(v), bump_up(v));
}

const ExactQuadratic& Scalar::exact() const {
  if (!is_exact()) fail(ErrorKind::Internal, "Scalar::exact() on an interval value");
  return std::get<ExactQuadratic>(v_);
}

const Interval& Scalar::interval() const {
  if (is_exact()) fail(ErrorKind::Internal, "Scalar::interval() on an exact value");
  return std::get<Interval>(v_);
}

Interval Scalar::enclosure() const { return is_exact() ? enclose(exact()) : interval(); }

std::string Scalar::str() const {
  if (is_exact()) return exact().str();
  std::ostringstream os;
  os.precision(17);
  os << "[" << interval().lo << ", " << interval().hi << "]";
  return os.str();
}

Scalar Scalar::parse(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  if (text.empty()) fail(ErrorKind::Parameter, "empty scalar expression");

  // split into signed terms at top-level + and -
  ExactQuadratic total(0);
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool neg = false;
    while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') neg = !neg;
      ++pos;
    }
    std::size_t end = pos;
    while (end < text.size() && text[end] != '+' && text[end] != '-') ++end;
    // keep exponent signs ("1e-6") glued to their term
    while (end < text.size() && end > pos && (text[end - 1] == 'e' || text[end - 1] == 'E') &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++end;
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    }
    if (end == pos) fail(ErrorKind::Parameter, "dangling sign in scalar expression '" + raw + "'");
    std::string term = text.substr(pos, end - pos);
    pos = end;

    ExactQuadratic value(0);
    auto s = term.find("sqrt");
    if (s == std::string::npos) {
      value = ExactQuadratic(parse_rational(term));
    } else {
      Rational coef = 1;
      if (s > 0) {
        if (term[s - 1] != '*') fail(ErrorKind::Parameter, "expected '*' before sqrt in '" + term + "'");
        coef = parse_rational(term.substr(0, s - 1));
      }
      std::string tail = term.substr(s + 4);
      auto div = tail.find('/');
      std::string dpart = div == std::string::npos ? tail : tail.substr(0, div);
      if (dpart.empty() || dpart.find_first_not_of("0123456789") != std::string::npos)
        fail(ErrorKind::Parameter, "malformed radicand in '" + term + "'");
      std::uint64_t d = std::stoull(dpart);
      if (d == 0) fail(ErrorKind::Parameter, "radicand must be positive in '" + term + "'");
      if (div != std::string::npos) {
        Rational q = parse_rational(tail.substr(div + 1));
        if (q == 0) fail(ErrorKind::Parameter, "division by zero in '" + term + "'");
        coef /= q;
      }
      value = ExactQuadratic(0, coef, d);
    }
    if (neg) value = -value;
    total += value;
  }
  return Scalar(total);
}

namespace {

Truth interval_less(const Interval& x, const Interval& y) {
  if (x.hi < y.lo) return Truth::True;
  if (x.lo >= y.hi) return Truth::False;
  return Truth::Unknown;
}

Truth interval_less_equal(const Interval& x, const Interval& y) {
  if (x.hi <= y.lo) return Truth::True;
  if (x.lo > y.hi) return Truth::False;
  return Truth::Unknown;
}

bool same_field(const ExactQuadratic& x, const ExactQuadratic& y) {
  return x.radicand() == 0 || y.radicand() == 0 || x.radicand() == y.radicand();
}

}  // namespace

Truth scalar_less(const Scalar& x, const Scalar& y) {
  if (x.is_exact() && y.is_exact() && same_field(x.exact(), y.exact()))
    return x.exact() < y.exact() ? Truth::True : Truth::False;
  return interval_less(x.enclosure(), y.enclosure());
}

Truth scalar_less_equal(const Scalar& x, const Scalar& y) {
  if (x.is_exact() && y.is_exact() && same_field(x.exact(), y.exact()))
    return x.exact() <= y.exact() ? Truth::True : Truth::False;
  return interval_less_equal(x.enclosure(), y.enclosure());
}

Scalar scalar_sub(const Scalar& x, const Scalar& y) {
  if (x.is_exact() && y.is_exact() && same_field(x.exact(), y.exact())) return Scalar(x.exact() - y.exact());
  return Scalar(x.enclosure() - y.enclosure());
}

Scalar scalar_add(const Scalar& x, const Scalar& y) {
  if (x.is_exact() && y.is_exact() && same_field(x.exact(), y.exact())) return Scalar(x.exact() + y.exact());
  return Scalar(x.enclosure() + y.enclosure());
}

Scalar scalar_scale(const Scalar& x, long long k) {
  if (x.is_exact()) return Scalar(x.exact() * ExactQuadratic(Rational(k)));
  return Scalar(x.interval().scaled(k));
}

}  // namespace rigidity
