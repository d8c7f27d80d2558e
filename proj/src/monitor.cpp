#include "stlenf/monitor.hpp"

#include <algorithm>
#include <set>

#include "stlenf/encoder.hpp"
#include "stlenf/errors.hpp"

namespace stlenf {

namespace {

// One temporal operand (a literal or the constant true) with enough profile
// data to answer exact point queries.
struct OperandEval {
  bool constant_true = false;
  PredKind kind = PredKind::GE;
  bool positive = true;
  TruthProfile profile;

  bool at(const Rational& t) const {
    if (constant_true) return true;
    bool b = truth_of_value(kind, profile.mu_at(t));
    return positive ? b : !b;
  }
};

OperandEval make_operand(const Signal& s, const StlFormula& f, const FormulaNode& n) {
  OperandEval e;
  if (n.kind == NodeKind::True) {
    e.constant_true = true;
    return e;
  }
  if (n.kind != NodeKind::Lit)
    throw std::runtime_error(
        "temporal operand is not a literal: composite operands are not supported");
  const Predicate& p = f.pred(n.pred);
  e.kind = p.kind;
  e.positive = n.positive;
  e.profile = build_profile(s, p.expr);
  return e;
}

// Instants at which either operand's truth can change, clipped to [0, hi],
// with 0, lo and hi always present. Between consecutive grid points every
// operand truth is constant, so quantifiers reduce to finitely many checks.
std::vector<Rational> truth_grid(const OperandEval& a, const OperandEval& b, const Rational& lo,
                                 const Rational& hi) {
  std::set<Rational> g{Rational(0), lo, hi};
  for (const OperandEval* e : {&a, &b}) {
    if (e->constant_true) continue;
    for (const Rational& t : e->profile.times)
      if (t >= 0 && t <= hi) g.insert(t);
  }
  return {g.begin(), g.end()};
}

struct ScanHit {
  bool found = false;
  Rational at;        // grid point of the item
  bool point = false; // true: the item is the instant itself; false: the open
                      // interval starting at `at`
};

// First item (point, then following open interval) in [0, hi] where the
// operand's truth equals `want`.
ScanHit first_item(const OperandEval& e, const std::vector<Rational>& grid, bool want) {
  ScanHit h;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (e.at(grid[i]) == want) {
      h.found = true;
      h.at = grid[i];
      h.point = true;
      return h;
    }
    if (i + 1 < grid.size()) {
      Rational mid = grid[i] + (grid[i + 1] - grid[i]) / 2;
      if (e.at(mid) == want) {
        h.found = true;
        h.at = grid[i];
        h.point = false;
        return h;
      }
    }
  }
  return h;
}

Verdict eval_until(const OperandEval& q1, const OperandEval& q2, const Interval& iv,
                   const std::vector<Rational>& grid) {
  // Largest prefix [0, A] (or [0, A)) on which q1 holds continuously.
  Rational bound = iv.hi;
  bool closed = true;
  ScanHit fail = first_item(q1, grid, false);
  if (fail.found) {
    bound = fail.at;
    closed = !fail.point;  // a failing instant excludes itself
  }
  if (bound > iv.hi) {
    bound = iv.hi;
    closed = true;
  }
  Verdict v;
  v.satisfied = false;
  if (bound < iv.lo || (bound == iv.lo && !closed)) return v;

  // Earliest q2 witness in [iv.lo, bound], honoring the right-end closedness.
  for (size_t i = 0; i < grid.size(); ++i) {
    const Rational& t = grid[i];
    if (t >= iv.lo && (t < bound || (t == bound && closed)) && q2.at(t)) {
      v.satisfied = true;
      v.witness = t;
      return v;
    }
    if (i + 1 < grid.size() && t >= iv.lo && grid[i + 1] <= bound) {
      Rational mid = t + (grid[i + 1] - t) / 2;
      if (q2.at(mid)) {
        v.satisfied = true;
        v.witness = mid;
        return v;
      }
    }
  }
  return v;
}

Verdict eval_release(const OperandEval& q1, const OperandEval& q2, const Interval& iv,
                     const std::vector<Rational>& grid) {
  // First instant (or open interval) where q1 holds: everything after is
  // released from the q2 obligation.
  ScanHit rel = first_item(q1, grid, true);
  Rational bound = iv.hi;
  bool closed = true;
  if (rel.found) {
    if (rel.point) {
      // released at rel.at itself: obligation ends just before
      if (rel.at <= iv.hi) {
        bound = rel.at;
        closed = false;
      }
    } else {
      // released strictly after rel.at: obligation includes rel.at
      if (rel.at < iv.hi) {
        bound = rel.at;
        closed = true;
      }
    }
  }
  Verdict v;
  v.satisfied = true;
  if (bound < iv.lo || (bound == iv.lo && !closed)) return v;

  for (size_t i = 0; i < grid.size(); ++i) {
    const Rational& t = grid[i];
    if (t >= iv.lo && (t < bound || (t == bound && closed)) && !q2.at(t)) {
      v.satisfied = false;
      v.witness = t;
      return v;
    }
    if (i + 1 < grid.size() && t >= iv.lo && grid[i + 1] <= bound) {
      Rational mid = t + (grid[i + 1] - t) / 2;
      if (!q2.at(mid)) {
        v.satisfied = false;
        v.witness = mid;
        return v;
      }
    }
  }
  return v;
}

Verdict eval_node(const Signal& s, const StlFormula& f, const FormulaNode& n) {
  switch (n.kind) {
    case NodeKind::True: return Verdict{true, std::nullopt};
    case NodeKind::Lit: {
      OperandEval e = make_operand(s, f, n);
      return Verdict{e.at(0), std::nullopt};
    }
    case NodeKind::And:
    case NodeKind::Or: {
      bool all = true, any = false;
      for (const auto& c : n.children) {
        Verdict cv = eval_node(s, f, *c);
        all = all && cv.satisfied;
        any = any || cv.satisfied;
      }
      return Verdict{n.kind == NodeKind::And ? all : any, std::nullopt};
    }
    case NodeKind::Until:
    case NodeKind::Release: {
      OperandEval q1 = make_operand(s, f, *n.children[0]);
      OperandEval q2 = make_operand(s, f, *n.children[1]);
      auto grid = truth_grid(q1, q2, n.interval.lo, n.interval.hi);
      return n.kind == NodeKind::Until ? eval_until(q1, q2, n.interval, grid)
                                       : eval_release(q1, q2, n.interval, grid);
    }
  }
  throw std::runtime_error("unsupported formula node");
}

}  // namespace

Verdict satisfies(const Signal& s, const StlFormula& phi) {
  auto rp = relevant_points(phi);
  if (!rp.empty()) {
    Rational horizon = rp.back();
    if (horizon > s.duration())
      throw HorizonError("signal shorter than formula horizon: needs " +
                         format_rational(horizon) + ", have " + format_rational(s.duration()));
  }
  return eval_node(s, phi, *phi.root);
}

}  // namespace stlenf
