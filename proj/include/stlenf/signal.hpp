#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "stlenf/errors.hpp"
#include "stlenf/rational.hpp"

namespace stlenf {

// Finite-duration multivariate piecewise-linear signal. Values between sample
// times are defined by linear interpolation; sample times strictly increase
// and start at 0.
struct Signal {
  std::vector<std::string> variables;
  std::vector<std::pair<Rational, std::vector<Rational>>> samples;

  Rational duration() const { return samples.empty() ? Rational(0) : samples.back().first; }

  int var_index(const std::string& name) const;

  // Exact interpolated values at t; requires 0 <= t <= duration.
  std::vector<Rational> value_at(const Rational& t) const;
  Rational value_at(const Rational& t, int var) const;
  std::map<std::string, Rational> point_at(const Rational& t) const;

  bool operator==(const Signal& o) const {
    return variables == o.variables && samples == o.samples;
  }
};

// CSV format: header "time,var1,...,varn"; one row per sample; fields are
// decimal or "p/q" rationals; rows ordered by strictly increasing time.
Signal load_csv(const std::string& path);
Signal parse_csv(std::istream& in, const std::string& origin);
void emit_csv(const Signal& s, std::ostream& out);
void save_csv(const Signal& s, const std::string& path);

}  // namespace stlenf
