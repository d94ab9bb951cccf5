#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cubeslice {

// Exact rational scalar. Every slicing / covering / probability predicate in
// this library is decided over Q; floating point appears only in the
// decomposition / rounding pipeline and in Monte Carlo estimates.
using Rational = mpq_class;

class parse_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Accepts "p/q", plain integers ("-3"), and decimal strings ("0.25", "-1.5e2").
// Rejects anything else; in particular no NaN/inf and no bare floats from JSON.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw parse_error("empty rational literal");
  std::string s = text;
  // strip one leading '+'
  if (s[0] == '+') s = s.substr(1);
  if (s.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw parse_error("bad rational literal: " + text);
    if (q.get_den() == 0) throw parse_error("zero denominator: " + text);
    q.canonicalize();
    return q;
  }
  // decimal / scientific form
  std::size_t epos = s.find_first_of("eE");
  long exp10 = 0;
  std::string mant = s;
  if (epos != std::string::npos) {
    mant = s.substr(0, epos);
    std::string es = s.substr(epos + 1);
    if (es.empty()) throw parse_error("bad exponent: " + text);
    try {
      exp10 = std::stol(es);
    } catch (...) {
      throw parse_error("bad exponent: " + text);
    }
  }
  std::size_t dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty() || digits == "-") throw parse_error("bad rational literal: " + text);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    char c = digits[i];
    if (!((c >= '0' && c <= '9') || (c == '-' && i == 0)))
      throw parse_error("bad rational literal: " + text);
  }
  mpz_class num(digits, 10);
  mpz_class den = 1;
  mpz_class pow;
  mpz_ui_pow_ui(pow.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  if (exp10 < 0)
    den = pow;
  else
    num *= pow;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Canonical form: "p/q", or just "p" when the denominator is one.
inline std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Doubles are dyadic rationals; the conversion is exact.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite double");
  Rational q(x);
  q.canonicalize();
  return q;
}

inline int sign(const Rational& q) { return sgn(q); }

// pi to 40 digits, rounded down / up. Used for certified comparisons of
// rational quantities against sqrt(pi): check m^2 * s^2 <= pi via these
// enclosures instead of ever forming sqrt(pi) itself.
inline const Rational& pi_lower() {
  static const Rational v("31415926535897932384626433832795028841971/10000000000000000000000000000000000000000");
  return v;
}
inline const Rational& pi_upper() {
  static const Rational v("31415926535897932384626433832795028841972/10000000000000000000000000000000000000000");
  return v;
}

}  // namespace cubeslice
