// Exact rational scalar and the double/rational dual-path helpers.
//
// Every indifference equation in the library is linear (or reduces to one),
// so when game payoffs and parameters are rational the derived constants can
// be computed without rounding.  Templated code uses Scalar = double for the
// numeric path and Scalar = Rational for the exact path; the helpers below
// smooth over the differences (tolerances, conversions, formatting).
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "repgame/errors.hpp"

namespace repgame {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <class Scalar>
inline Scalar scalar_from_int(long long v) {
  return Scalar(v);
}

// Equality check: exact for Rational, tolerance-based for double.
inline bool scalar_eq(const Rational& a, const Rational& b, double) {
  return a == b;
}
inline bool scalar_eq(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

// >= with tolerance slack on the double path.
inline bool scalar_geq(const Rational& a, const Rational& b, double) {
  return a >= b;
}
inline bool scalar_geq(double a, double b, double tol) { return a >= b - tol; }

inline bool scalar_gt(const Rational& a, const Rational& b, double) {
  return a > b;
}
inline bool scalar_gt(double a, double b, double tol) { return a > b + tol; }

// Parses "p/q", integers, and plain decimal notation ("0.25", "-3.5e2" is
// rejected: exponents would defeat the point of the exact path).
inline std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      boost::multiprecision::cpp_int num(text.substr(0, slash));
      boost::multiprecision::cpp_int den(text.substr(slash + 1));
      if (den == 0) return std::nullopt;
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
      return Rational(boost::multiprecision::cpp_int(text));
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0 || digits.empty()) return std::nullopt;
    bool neg = false;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
      neg = digits[0] == '-';
      digits = digits.substr(1);
    }
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      return std::nullopt;
    }
    boost::multiprecision::cpp_int num(digits);
    boost::multiprecision::cpp_int den = 1;
    for (size_t i = 0; i < frac_len; ++i) den *= 10;
    Rational r(num, den);
    return neg ? Rational(-r) : r;
  } catch (...) {
    return std::nullopt;
  }
}

// Canonical text form: integers stay bare, everything else is "p/q".
inline std::string format_rational(const Rational& x) {
  using boost::multiprecision::cpp_int;
  cpp_int num = numerator(x);
  cpp_int den = denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace repgame
