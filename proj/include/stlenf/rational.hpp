#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace stlenf {

// All timestamps, signal values and coefficients are exact rationals.
using Rational = mpq_class;

// Parses "7", "-0.25", ".5" or "p/q" (e.g. "-3/40"). Throws std::runtime_error
// with a descriptive message on anything else.
Rational parse_rational(const std::string& text);

// Renders a rational as a finite decimal when one exists (denominator 2^a*5^b),
// otherwise as "p/q". parse_rational(format_rational(r)) == r always holds.
std::string format_rational(const Rational& r);

// Convenience: rational from integer.
inline Rational rat(long n) { return Rational(n); }
inline Rational rat(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational rat_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline int rat_sign(const Rational& r) { return sgn(r); }

}  // namespace stlenf
