#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stlenf/errors.hpp"
#include "stlenf/rational.hpp"
#include "stlenf/stl.hpp"

namespace stlenf {

// One affine constraint over named variables: sum(coeffs[v] * x[v]) REL rhs.
struct LinearConstraint {
  enum class Rel { GE, LE, EQ };

  std::map<std::string, Rational> coeffs;
  Rel rel = Rel::GE;
  Rational rhs;
};

// A request to repair the point value at one timestamp: flip every predicate
// in `fix` to the opposite of its current action bit while keeping the other
// action literals (over shared variables) intact.
struct ModificationRequest {
  std::map<std::string, Rational> point;
  std::map<std::string, bool> action;
  std::set<std::string> fix;
  std::vector<Predicate> preds;
};

struct ModificationResult {
  std::map<std::string, Rational> point;   // full point after substitution
  std::map<std::string, Rational> deltas;  // new - old, for touched variables
  Rational distance2;                      // squared Euclidean distance

  double distance() const;
};

// Minimum-distance repair; throws InfeasibleError when the tightened
// constraint set is empty.
ModificationResult modify(const ModificationRequest& req, const Rational& eps);

// Exact projection of a point onto a single affine constraint (no-op when the
// point already satisfies it). Throws on an all-zero coefficient vector.
std::map<std::string, Rational> project_halfspace(const std::map<std::string, Rational>& point,
                                                  const std::map<std::string, Rational>& coeffs,
                                                  LinearConstraint::Rel rel, const Rational& rhs);

// Minimum-distance point of the intersection of the given constraints,
// starting from `center`. Exact over rationals (active-set enumeration).
std::map<std::string, Rational> solve_qp(const std::map<std::string, Rational>& center,
                                         const std::vector<LinearConstraint>& constraints);

// Squared Euclidean distance between two points over the union of their keys
// (missing entries read as unchanged).
Rational distance2(const std::map<std::string, Rational>& a,
                   const std::map<std::string, Rational>& b);

}  // namespace stlenf
