#pragma once

// Shared helpers for the test suite: an independent brute-force satisfaction
// oracle over piecewise-linear signals, randomized formula/signal/QP-instance
// generators, and a grid-search oracle for the minimum-distance repair step.
//
// The generators put sample values on the 1/8 lattice and predicate
// thresholds at odd multiples of 1/32, so no sample ever sits exactly on a
// threshold: zero crossings are always transversal, which keeps the random
// corpus free of tangential touches while still producing boundary
// coincidences (crossings landing exactly on interval endpoints).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlenf/encoder.hpp"
#include "stlenf/modifier.hpp"
#include "stlenf/signal.hpp"
#include "stlenf/stl.hpp"
#include "stlenf/transducer.hpp"

namespace testsupport {

using namespace stlenf;

// ---------------------------------------------------------------------------
// Brute-force satisfaction oracle.
//
// Quantifiers over dense time are decided on a finite inspection set: every
// sample time, every interior zero crossing of every predicate (computed here
// from scratch, segment by segment), every relevant point, plus the midpoint
// of each consecutive pair. Truth is constant between consecutive change
// instants, so checking the inspection set is exact.
// ---------------------------------------------------------------------------

inline bool oracle_literal(const Signal& s, const StlFormula& f, const FormulaNode& n,
                           const Rational& t) {
  const Predicate& p = f.pred(n.pred);
  Rational mu = p.expr.eval(s.point_at(t));
  bool v = truth_of_value(p.kind, mu);
  return n.positive ? v : !v;
}

// True/Lit/And/Or layer (the operand language of the temporal operators).
inline bool oracle_layer(const Signal& s, const StlFormula& f, const FormulaNode& n,
                         const Rational& t) {
  switch (n.kind) {
    case NodeKind::True:
      return true;
    case NodeKind::Lit:
      return oracle_literal(s, f, n, t);
    case NodeKind::And:
      for (const auto& c : n.children)
        if (!oracle_layer(s, f, *c, t)) return false;
      return true;
    case NodeKind::Or:
      for (const auto& c : n.children)
        if (oracle_layer(s, f, *c, t)) return true;
      return false;
    default:
      throw std::runtime_error("temporal node inside an operand");
  }
}

inline std::vector<Rational> oracle_inspection_points(const Signal& s, const StlFormula& f) {
  std::set<Rational> ts;
  for (const auto& sm : s.samples) ts.insert(sm.first);
  for (const auto& p : f.preds) {
    for (size_t i = 0; i + 1 < s.samples.size(); ++i) {
      const Rational& t0 = s.samples[i].first;
      const Rational& t1 = s.samples[i + 1].first;
      Rational m0 = p.expr.eval(s.point_at(t0));
      Rational m1 = p.expr.eval(s.point_at(t1));
      if (rat_sign(m0) * rat_sign(m1) < 0) ts.insert(t0 + (t1 - t0) * m0 / (m0 - m1));
    }
  }
  for (const Rational& r : relevant_points(f))
    if (r <= s.duration()) ts.insert(r);
  std::vector<Rational> base(ts.begin(), ts.end());
  std::vector<Rational> out;
  for (size_t i = 0; i < base.size(); ++i) {
    if (i) out.push_back((base[i - 1] + base[i]) / 2);
    out.push_back(base[i]);
  }
  return out;
}

inline bool oracle_until(const Signal& s, const StlFormula& f, const FormulaNode& n,
                         const std::vector<Rational>& insp) {
  for (const Rational& tp : insp) {
    if (tp < n.interval.lo || tp > n.interval.hi) continue;
    if (!oracle_layer(s, f, *n.children[1], tp)) continue;
    bool hold = true;
    for (const Rational& tq : insp) {
      if (tq > tp) break;
      if (!oracle_layer(s, f, *n.children[0], tq)) {
        hold = false;
        break;
      }
    }
    if (hold) return true;
  }
  return false;
}

inline bool oracle_release(const Signal& s, const StlFormula& f, const FormulaNode& n,
                           const std::vector<Rational>& insp) {
  for (const Rational& tp : insp) {
    if (tp < n.interval.lo || tp > n.interval.hi) continue;
    if (oracle_layer(s, f, *n.children[1], tp)) continue;
    bool released = false;
    for (const Rational& tq : insp) {
      if (tq > tp) break;
      if (oracle_layer(s, f, *n.children[0], tq)) {
        released = true;
        break;
      }
    }
    if (!released) return false;
  }
  return true;
}

inline bool oracle_node(const Signal& s, const StlFormula& f, const FormulaNode& n,
                        const std::vector<Rational>& insp) {
  switch (n.kind) {
    case NodeKind::True:
      return true;
    case NodeKind::Lit:
      return oracle_literal(s, f, n, Rational(0));
    case NodeKind::And:
      for (const auto& c : n.children)
        if (!oracle_node(s, f, *c, insp)) return false;
      return true;
    case NodeKind::Or:
      for (const auto& c : n.children)
        if (oracle_node(s, f, *c, insp)) return true;
      return false;
    case NodeKind::Until:
      return oracle_until(s, f, n, insp);
    case NodeKind::Release:
      return oracle_release(s, f, n, insp);
  }
  throw std::runtime_error("unreachable");
}

inline bool oracle_satisfies(const Signal& s, const StlFormula& f) {
  return oracle_node(s, f, *f.root, oracle_inspection_points(s, f));
}

// ---------------------------------------------------------------------------
// Random formulas and signals.
// ---------------------------------------------------------------------------

// Threshold at an odd multiple of 1/32 in (-2, 2).
inline Rational random_threshold(std::mt19937_64& rng) {
  long k = static_cast<long>(rng() % 64);  // numerator 2k+1-64: odd, in [-63, 63]
  return rat(2 * k + 1 - 64, 32);
}

struct LiteralDraw {
  std::string text;
  std::string var;
  Rational threshold;
};

inline LiteralDraw random_literal(std::mt19937_64& rng, const std::vector<std::string>& vars) {
  LiteralDraw d;
  d.var = vars[rng() % vars.size()];
  d.threshold = random_threshold(rng);
  std::string th = format_rational(d.threshold);
  switch (rng() % 10) {
    case 0:
    case 1:
    case 2:
      d.text = d.var + " >= " + th;
      break;
    case 3:
    case 4:
      d.text = d.var + " > " + th;
      break;
    case 5:
    case 6:
      d.text = d.var + " <= " + th;
      break;
    case 7:
      d.text = d.var + " < " + th;
      break;
    case 8:
      d.text = d.var + " == " + th;
      break;
    default:
      d.text = "!(" + d.var + " >= " + th + ")";
      break;
  }
  return d;
}

// "[lo,hi]" on the 1/4 lattice; includes punctual and lo = 0 shapes.
inline std::string random_interval(std::mt19937_64& rng) {
  static const long lo_num[] = {0, 0, 1, 2, 4, 6};   // quarters
  static const long wid_num[] = {0, 1, 2, 4, 8, 4};  // quarters
  Rational lo = rat(lo_num[rng() % 6], 4);
  Rational hi = lo + rat(wid_num[rng() % 6], 4);
  return "[" + format_rational(lo) + "," + format_rational(hi) + "]";
}

// One temporal term over `vars`; the two operands never name the same
// predicate (conservatively: distinct variable/threshold pair, or 'true').
inline std::string random_temporal_term(std::mt19937_64& rng,
                                        const std::vector<std::string>& vars) {
  LiteralDraw a = random_literal(rng, vars);
  std::string left = a.text;
  std::string right;
  if (rng() % 10 == 0) {
    if (rng() % 2 == 0)
      left = "true";
    else
      right = "true";
  }
  if (right.empty()) {
    for (;;) {
      LiteralDraw b = random_literal(rng, vars);
      if (left == "true" || b.var != a.var || b.threshold != a.threshold) {
        right = b.text;
        break;
      }
    }
  }
  const char* op = rng() % 2 == 0 ? " U" : " R";
  return "(" + left + ")" + op + random_interval(rng) + " (" + right + ")";
}

// shape 0: one Until; 1: one Release; 2: conjunction of two temporal terms;
// 3: disjunction. Product shapes draw each side over its own variable pool.
inline std::string random_formula_text(std::mt19937_64& rng, int shape) {
  std::vector<std::string> left_vars = {"x1", "x2"};
  std::vector<std::string> right_vars = {"x3", "x4"};
  std::vector<std::string> all_vars = {"x1", "x2", "x3", "x4"};
  switch (shape) {
    case 0: {
      LiteralDraw a = random_literal(rng, all_vars);
      LiteralDraw b = random_literal(rng, all_vars);
      while (b.var == a.var && b.threshold == a.threshold) b = random_literal(rng, all_vars);
      return "(" + a.text + ") U" + random_interval(rng) + " (" + b.text + ")";
    }
    case 1: {
      LiteralDraw a = random_literal(rng, all_vars);
      LiteralDraw b = random_literal(rng, all_vars);
      while (b.var == a.var && b.threshold == a.threshold) b = random_literal(rng, all_vars);
      return "(" + a.text + ") R" + random_interval(rng) + " (" + b.text + ")";
    }
    case 2:
      return random_temporal_term(rng, left_vars) + " and " +
             random_temporal_term(rng, right_vars);
    default:
      return random_temporal_term(rng, left_vars) + " or " +
             random_temporal_term(rng, right_vars);
  }
}

// Piecewise-linear signal over `vars`: times step by 1/4..1 quarters, values
// on the 1/8 lattice in [-2, 3]; runs until it covers `horizon`.
inline Signal random_signal(std::mt19937_64& rng, const std::vector<std::string>& vars,
                            const Rational& horizon) {
  Signal s;
  s.variables = vars;
  Rational t = 0;
  for (;;) {
    std::vector<Rational> row;
    for (size_t i = 0; i < vars.size(); ++i)
      row.push_back(rat(static_cast<long>(rng() % 41) - 16, 8));
    s.samples.emplace_back(t, std::move(row));
    if (t >= horizon) break;
    t += rat(static_cast<long>(rng() % 4) + 1, 4);
  }
  return s;
}

inline std::vector<std::string> formula_variables(const StlFormula& f) {
  std::set<std::string> vs;
  for (const auto& p : f.preds)
    for (const auto& v : p.expr.support()) vs.insert(v);
  return {vs.begin(), vs.end()};
}

struct RandomCase {
  std::string text;
  StlFormula phi;
  Signal sig;
};

inline RandomCase random_case(std::mt19937_64& rng, int shape) {
  RandomCase rc;
  rc.text = random_formula_text(rng, shape);
  rc.phi = parse_formula(rc.text);
  rc.sig = random_signal(rng, formula_variables(rc.phi), relevant_points(rc.phi).back());
  return rc;
}

// Verdict of the full pipeline front half: encode, compile, run.
inline bool run_accepts(const StlFormula& f, const Signal& s) {
  TimedTransducer a = compile(f);
  RunResult r = run(a, sign_encode(s, f));
  return r.accepted && r.all_top();
}

// ---------------------------------------------------------------------------
// Random QP instances and the grid-search oracle.
//
// Instances are shaped so the grid can always get within ~1.5e-3 of the true
// minimum: normals have coordinates in {-1,0,1} and every right-hand side
// sits on the 1e-3 lattice relative to the center, so flats of the feasible
// set always contain grid points.
// ---------------------------------------------------------------------------

struct QpInstance {
  std::map<std::string, Rational> center;
  std::vector<LinearConstraint> constraints;
};

inline QpInstance random_qp_instance(std::mt19937_64& rng) {
  static const std::string names[2] = {"x", "y"};
  QpInstance q;
  size_t dims = 1 + rng() % 2;
  for (size_t i = 0; i < dims; ++i)
    q.center[names[i]] = rat(static_cast<long>(rng() % 41) - 20, 10);
  size_t ncons = 1 + rng() % 3;
  for (size_t i = 0; i < ncons; ++i) {
    LinearConstraint c;
    switch (rng() % 5) {
      case 0:
        c.rel = LinearConstraint::Rel::EQ;
        break;
      case 1:
      case 2:
        c.rel = LinearConstraint::Rel::GE;
        break;
      default:
        c.rel = LinearConstraint::Rel::LE;
        break;
    }
    if (c.rel == LinearConstraint::Rel::EQ) {
      const std::string& v = names[rng() % dims];
      c.coeffs[v] = 1;
      c.rhs = q.center.at(v) + rat(static_cast<long>(rng() % 201) - 100, 1000);
    } else {
      Rational at_center = 0;
      for (;;) {
        for (size_t k = 0; k < dims; ++k) {
          long co = static_cast<long>(rng() % 3) - 1;
          if (co != 0)
            c.coeffs[names[k]] = co;
          else
            c.coeffs.erase(names[k]);
        }
        if (!c.coeffs.empty()) break;
      }
      for (const auto& [v, co] : c.coeffs) at_center += co * q.center.at(v);
      c.rhs = at_center + rat(static_cast<long>(rng() % 241) - 120, 1000);
    }
    q.constraints.push_back(c);
  }
  return q;
}

// Minimum distance from `center` to a feasible grid point (step-spaced, box
// of the given radius); nullopt when no grid point is feasible.
inline std::optional<double> grid_min_distance(const std::map<std::string, Rational>& center,
                                               const std::vector<LinearConstraint>& cons,
                                               double step, double radius) {
  std::vector<std::string> vars;
  std::vector<double> c0;
  for (const auto& [v, x] : center) {
    vars.push_back(v);
    c0.push_back(to_double(x));
  }
  const long n = std::lround(std::ceil(radius / step));
  std::vector<long> idx(vars.size(), -n);
  std::optional<double> best;
  for (;;) {
    double d2 = 0;
    for (size_t i = 0; i < vars.size(); ++i) {
      double dx = static_cast<double>(idx[i]) * step;
      d2 += dx * dx;
    }
    if (!best || d2 < *best * *best) {
      bool feas = true;
      for (const auto& cn : cons) {
        double lhs = 0;
        for (const auto& [v, co] : cn.coeffs) {
          size_t i = std::find(vars.begin(), vars.end(), v) - vars.begin();
          lhs += to_double(co) * (c0[i] + static_cast<double>(idx[i]) * step);
        }
        double rhs = to_double(cn.rhs);
        bool ok = cn.rel == LinearConstraint::Rel::GE   ? lhs >= rhs - 1e-9
                  : cn.rel == LinearConstraint::Rel::LE ? lhs <= rhs + 1e-9
                                                        : std::abs(lhs - rhs) <= 1e-9;
        if (!ok) {
          feas = false;
          break;
        }
      }
      if (feas) best = std::sqrt(d2);
    }
    size_t k = 0;
    while (k < idx.size() && ++idx[k] > n) {
      idx[k] = -n;
      ++k;
    }
    if (k == idx.size()) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Structural sweep: a spread of machines for determinism / self-correction
// checks. Product entries combine machines with disjoint variable support.
// ---------------------------------------------------------------------------

inline Predicate make_pred(const std::string& id, const std::string& var, PredKind kind,
                           const Rational& thr, bool below = false) {
  Predicate p;
  p.id = id;
  p.kind = kind;
  p.expr.coeffs[var] = below ? -1 : 1;
  p.expr.constant = below ? thr : -thr;
  return p;
}

inline std::vector<TimedTransducer> structural_sweep() {
  Predicate p1 = make_pred("p1", "x1", PredKind::GE, rat(7, 10));
  Predicate p2 = make_pred("p2", "x2", PredKind::GE, rat(1, 2));
  Predicate p3 = make_pred("p3", "x3", PredKind::GT, rat(1, 4));
  Predicate p4 = make_pred("p4", "x4", PredKind::EQ, rat(0));
  std::vector<Interval> shapes = {{rat(1), rat(2)}, {rat(0), rat(2)}, {rat(1), rat(1)},
                                  {rat(0), rat(0)}};
  std::vector<std::pair<TemporalOperand, TemporalOperand>> ops = {
      {TemporalOperand::atom(p1), TemporalOperand::atom(p2)},
      {TemporalOperand::atom(p1, false), TemporalOperand::atom(p2)},
      {TemporalOperand::atom(p1), TemporalOperand::atom(p2, false)},
      {TemporalOperand::top(), TemporalOperand::atom(p2)},
      {TemporalOperand::atom(p1), TemporalOperand::top()},
      {TemporalOperand::atom(p3), TemporalOperand::atom(p4)},
  };
  std::vector<TimedTransducer> out;
  for (const auto& iv : shapes) {
    for (const auto& [a, b] : ops) {
      out.push_back(build_until(a, b, iv));
      out.push_back(build_release(a, b, iv));
    }
  }
  TimedTransducer left = build_until(p1, p2, {rat(1), rat(2)});
  TimedTransducer right = build_release(p3, p4, {rat(0), rat(1)});
  out.push_back(product(left, right, ProductOp::And));
  out.push_back(product(left, right, ProductOp::Or));
  out.push_back(product(build_release(p1, p2, {rat(1), rat(1)}),
                        build_until(p3, p4, {rat(0), rat(2)}), ProductOp::And));
  out.push_back(product(build_release(p1, p2, {rat(0), rat(1)}),
                        build_until(p3, p4, {rat(1), rat(2)}), ProductOp::Or));
  return out;
}

}  // namespace testsupport
