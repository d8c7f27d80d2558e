#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stlenf/errors.hpp"
#include "stlenf/rational.hpp"

namespace stlenf {

// Affine expression over named variables: sum(coeffs[v] * v) + constant.
struct AffineExpr {
  std::map<std::string, Rational> coeffs;
  Rational constant = 0;

  Rational eval(const std::map<std::string, Rational>& point) const;
  std::set<std::string> support() const;
  AffineExpr negated() const;

  bool operator==(const AffineExpr& o) const {
    return coeffs == o.coeffs && constant == o.constant;
  }
};

// Predicates are kept in a normal form: expr >= 0, expr > 0 or expr == 0.
// "lhs <= rhs" and "lhs < rhs" are stored with the expression negated.
enum class PredKind { GE, GT, EQ };

struct Predicate {
  std::string id;  // "p1", "p2", ... in first-occurrence order
  AffineExpr expr;
  PredKind kind = PredKind::GE;

  bool same_shape(const Predicate& o) const { return kind == o.kind && expr == o.expr; }
};

// Evaluates the predicate at a variable assignment (exact).
bool eval_predicate(const Predicate& p, const std::map<std::string, Rational>& point);

// Closed rational interval attached to a temporal operator; 0 <= lo <= hi.
struct Interval {
  Rational lo;
  Rational hi;
};

enum class NodeKind { True, Lit, And, Or, Until, Release };

// Formula tree. Lit nodes index into StlFormula::preds ("!" folds into the
// polarity flag — formulas stay in negation normal form). And/Or appear both
// in the literal layer (operands of U/R) and at the top level; Until/Release
// are never nested (enforced by the parser and by compile()).
struct FormulaNode {
  NodeKind kind = NodeKind::True;
  int pred = -1;                                        // Lit
  bool positive = true;                                 // Lit: false for "!atom"
  std::vector<std::shared_ptr<FormulaNode>> children;   // And/Or: 2+; Until/Release: 2
  Interval interval;                                    // Until/Release
};

using NodePtr = std::shared_ptr<FormulaNode>;

struct StlFormula {
  NodePtr root;
  std::vector<Predicate> preds;  // deduplicated, ordered by first occurrence

  const Predicate& pred(int i) const { return preds.at(static_cast<size_t>(i)); }
};

// Parses the property grammar. Errors: "syntax error at position N", "nested
// temporal operator", "interval lo > hi", "non-affine expression".
StlFormula parse_formula(const std::string& text);

// Canonical text form; parse_formula(to_text(f)) yields a structurally equal tree.
std::string to_text(const StlFormula& f);

bool structurally_equal(const StlFormula& a, const StlFormula& b);

// All predicates of the formula (the dedup order used for word columns).
const std::vector<Predicate>& predicates(const StlFormula& f);

// Ordered set {0} ∪ interval endpoints of every temporal operator.
std::vector<Rational> relevant_points(const StlFormula& f);

// Zero-set descriptor per predicate: the hyperplane expr == 0, plus the solved
// threshold when the predicate mentions exactly one variable.
struct ValuationDescriptor {
  AffineExpr plane;
  std::optional<std::pair<std::string, Rational>> threshold;  // var, value
};

std::map<std::string, ValuationDescriptor> variable_valuations(const StlFormula& f);

}  // namespace stlenf
