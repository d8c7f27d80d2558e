#include "stlenf/rational.hpp"

#include <stdexcept>

namespace stlenf {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  // Trim surrounding whitespace.
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  auto e = s.find_last_not_of(ws);
  if (b == std::string::npos) throw std::runtime_error("empty rational literal");
  s = s.substr(b, e - b + 1);

  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = (s[0] == '-');
    s = s.substr(1);
  }
  if (s.empty()) throw std::runtime_error("malformed rational literal: '" + text + "'");

  auto slash = s.find('/');
  Rational r;
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw std::runtime_error("malformed rational literal: '" + text + "'");
    mpz_class n(num, 10), d(den, 10);
    if (d == 0) throw std::runtime_error("zero denominator in rational literal: '" + text + "'");
    r = Rational(n, d);
    r.canonicalize();
  } else {
    auto dot = s.find('.');
    if (dot == std::string::npos) {
      if (!all_digits(s)) throw std::runtime_error("malformed rational literal: '" + text + "'");
      r = Rational(mpz_class(s, 10));
    } else {
      std::string intpart = s.substr(0, dot);
      std::string frac = s.substr(dot + 1);
      if (intpart.empty()) intpart = "0";
      if (frac.empty() || !all_digits(intpart) || !all_digits(frac))
        throw std::runtime_error("malformed rational literal: '" + text + "'");
      mpz_class scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
      mpz_class n = mpz_class(intpart, 10) * scale + mpz_class(frac, 10);
      r = Rational(n, scale);
      r.canonicalize();
    }
  }
  if (neg) r = -r;
  return r;
}

std::string format_rational(const Rational& r) {
  mpz_class num = r.get_num();
  mpz_class den = r.get_den();
  if (den == 1) return num.get_str();

  // A finite decimal exists iff den = 2^a * 5^b.
  mpz_class d = den;
  unsigned long a = 0, b5 = 0;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) {
    mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), 2);
    ++a;
  }
  while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) {
    mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), 5);
    ++b5;
  }
  if (d != 1) return num.get_str() + "/" + den.get_str();

  unsigned long digits = std::max(a, b5);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class scaled = num * scale / den;  // exact by construction

  bool neg = scaled < 0;
  std::string t = (neg ? mpz_class(-scaled) : scaled).get_str();
  if (t.size() <= digits) t.insert(0, digits - t.size() + 1, '0');
  t.insert(t.size() - digits, ".");
  // Strip trailing zeros in the fraction (keeps shortest exact form).
  while (t.back() == '0') t.pop_back();
  if (t.back() == '.') t.pop_back();
  return (neg ? "-" : "") + t;
}

}  // namespace stlenf
