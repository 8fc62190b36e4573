#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace hypsol {

using Rational = boost::rational<std::int64_t>;

inline std::int64_t floor_of(const Rational& r) {
  std::int64_t n = r.numerator(), d = r.denominator();
  std::int64_t q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

inline std::int64_t ceil_of(const Rational& r) { return -floor_of(-r); }

inline bool is_integer(const Rational& r) { return r.denominator() == 1; }

inline bool is_even_integer(const Rational& r) {
  return r.denominator() == 1 && r.numerator() % 2 == 0;
}

/// Closed interval [lo, hi] contains an integer.
inline bool interval_has_integer(const Rational& lo, const Rational& hi) {
  return ceil_of(lo) <= floor_of(hi);
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "a" or "a/b".
inline Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(std::stoll(s));
  return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

}  // namespace hypsol
