#include "stlenf/modifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace stlenf {

double ModificationResult::distance() const { return std::sqrt(to_double(distance2)); }

Rational distance2(const std::map<std::string, Rational>& a,
                   const std::map<std::string, Rational>& b) {
  Rational d = 0;
  for (const auto& [k, va] : a) {
    auto it = b.find(k);
    if (it == b.end()) continue;
    Rational diff = va - it->second;
    d += diff * diff;
  }
  return d;
}

namespace {

Rational dot(const std::map<std::string, Rational>& coeffs,
             const std::map<std::string, Rational>& point) {
  Rational v = 0;
  for (const auto& [var, c] : coeffs) {
    auto it = point.find(var);
    if (it == point.end()) throw std::runtime_error("point missing variable '" + var + "'");
    v += c * it->second;
  }
  return v;
}

bool constraint_holds(const LinearConstraint& c, const std::map<std::string, Rational>& point) {
  Rational v = dot(c.coeffs, point);
  switch (c.rel) {
    case LinearConstraint::Rel::GE: return v >= c.rhs;
    case LinearConstraint::Rel::LE: return v <= c.rhs;
    case LinearConstraint::Rel::EQ: return v == c.rhs;
  }
  return false;
}

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;

// Gaussian elimination to reduced form over the rationals; rows are
// [coeffs... | rhs]. Returns the independent pivot rows, or nullopt when the
// system is inconsistent.
std::optional<Mat> reduce_rows(Mat rows, size_t n) {
  size_t pivot_row = 0;
  for (size_t col = 0; col < n && pivot_row < rows.size(); ++col) {
    size_t sel = pivot_row;
    while (sel < rows.size() && rows[sel][col] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[pivot_row], rows[sel]);
    Rational p = rows[pivot_row][col];
    for (auto& x : rows[pivot_row]) x /= p;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r == pivot_row || rows[r][col] == 0) continue;
      Rational f = rows[r][col];
      for (size_t k = 0; k <= n; ++k) rows[r][k] -= f * rows[pivot_row][k];
    }
    ++pivot_row;
  }
  Mat out;
  for (size_t r = 0; r < rows.size(); ++r) {
    bool all_zero = true;
    for (size_t k = 0; k < n; ++k)
      if (rows[r][k] != 0) all_zero = false;
    if (all_zero) {
      if (rows[r][n] != 0) return std::nullopt;  // 0 = nonzero: inconsistent
      continue;
    }
    out.push_back(std::move(rows[r]));
  }
  return out;
}

// Solves the square linear system A x = b (A invertible) exactly.
Vec solve_square(Mat a, Vec b) {
  size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t sel = col;
    while (sel < n && a[sel][col] == 0) ++sel;
    if (sel == n) throw std::runtime_error("singular system");
    std::swap(a[col], a[sel]);
    std::swap(b[col], b[sel]);
    Rational p = a[col][col];
    for (auto& x : a[col]) x /= p;
    b[col] /= p;
    for (size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col];
      for (size_t k = 0; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  return b;
}

// Minimizer of ‖y − x0‖² subject to the given equality rows; nullopt when the
// rows are inconsistent.
std::optional<Vec> project_affine(const Vec& x0, const Mat& rows, size_t n) {
  auto reduced = reduce_rows(rows, n);
  if (!reduced) return std::nullopt;
  if (reduced->empty()) return x0;
  size_t m = reduced->size();
  // y = x0 + Mᵀλ with (M Mᵀ) λ = b − M x0.
  Mat gram(m, Vec(m, Rational(0)));
  Vec rhs(m, Rational(0));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      Rational s = 0;
      for (size_t k = 0; k < n; ++k) s += (*reduced)[i][k] * (*reduced)[j][k];
      gram[i][j] = s;
    }
    Rational mx = 0;
    for (size_t k = 0; k < n; ++k) mx += (*reduced)[i][k] * x0[k];
    rhs[i] = (*reduced)[i][n] - mx;
  }
  Vec lambda = solve_square(std::move(gram), std::move(rhs));
  Vec y = x0;
  for (size_t i = 0; i < m; ++i)
    for (size_t k = 0; k < n; ++k) y[k] += lambda[i] * (*reduced)[i][k];
  return y;
}

}  // namespace

std::map<std::string, Rational> project_halfspace(const std::map<std::string, Rational>& point,
                                                  const std::map<std::string, Rational>& coeffs,
                                                  LinearConstraint::Rel rel, const Rational& rhs) {
  Rational norm2 = 0;
  for (const auto& [var, c] : coeffs) norm2 += c * c;
  if (norm2 == 0) throw std::runtime_error("zero coefficient vector");
  Rational val = dot(coeffs, point);
  bool ok = rel == LinearConstraint::Rel::GE   ? val >= rhs
            : rel == LinearConstraint::Rel::LE ? val <= rhs
                                               : val == rhs;
  if (ok) return point;
  Rational scale = (val - rhs) / norm2;
  auto out = point;
  for (const auto& [var, c] : coeffs) out[var] -= scale * c;
  return out;
}

std::map<std::string, Rational> solve_qp(const std::map<std::string, Rational>& center,
                                         const std::vector<LinearConstraint>& constraints) {
  // Normalize: drop constraints with no variables (checking consistency),
  // split into equalities and ≥-inequalities over a fixed variable order.
  std::vector<LinearConstraint> eqs, ineqs;
  std::set<std::string> varset;
  for (const auto& c : constraints) {
    LinearConstraint cc;
    cc.rhs = c.rhs;
    cc.rel = c.rel;
    for (const auto& [var, coef] : c.coeffs)
      if (coef != 0) cc.coeffs[var] = coef;
    if (cc.coeffs.empty()) {
      bool ok = cc.rel == LinearConstraint::Rel::GE   ? Rational(0) >= cc.rhs
                : cc.rel == LinearConstraint::Rel::LE ? Rational(0) <= cc.rhs
                                                      : cc.rhs == 0;
      if (!ok) throw InfeasibleError("empty feasible set");
      continue;
    }
    for (const auto& [var, coef] : cc.coeffs) varset.insert(var);
    if (cc.rel == LinearConstraint::Rel::LE) {
      for (auto& [var, coef] : cc.coeffs) coef = -coef;
      cc.rhs = -cc.rhs;
      cc.rel = LinearConstraint::Rel::GE;
    }
    (cc.rel == LinearConstraint::Rel::EQ ? eqs : ineqs).push_back(std::move(cc));
  }
  if (varset.empty()) return center;
  if (ineqs.size() > 16) throw std::runtime_error("too many inequality constraints");

  std::vector<std::string> vars(varset.begin(), varset.end());
  size_t n = vars.size();
  Vec x0(n);
  for (size_t i = 0; i < n; ++i) {
    auto it = center.find(vars[i]);
    if (it == center.end())
      throw std::runtime_error("point missing variable '" + vars[i] + "'");
    x0[i] = it->second;
  }
  auto row_of = [&](const LinearConstraint& c) {
    Vec row(n + 1, Rational(0));
    for (const auto& [var, coef] : c.coeffs)
      row[std::lower_bound(vars.begin(), vars.end(), var) - vars.begin()] = coef;
    row[n] = c.rhs;
    return row;
  };

  // The minimizer of a strictly convex QP equals the projection onto the
  // affine hull of its active constraints; enumerate candidate active sets
  // and keep the best primal-feasible projection.
  std::optional<Vec> best;
  Rational best_d2 = 0;
  for (size_t mask = 0; mask < (size_t(1) << ineqs.size()); ++mask) {
    Mat rows;
    for (const auto& e : eqs) rows.push_back(row_of(e));
    for (size_t i = 0; i < ineqs.size(); ++i)
      if (mask & (size_t(1) << i)) rows.push_back(row_of(ineqs[i]));
    auto y = project_affine(x0, rows, n);
    if (!y) continue;
    bool feasible = true;
    for (const auto& e : eqs) {
      Rational v = 0;
      for (size_t k = 0; k < n; ++k) v += row_of(e)[k] * (*y)[k];
      if (v != e.rhs) feasible = false;
    }
    for (const auto& c : ineqs) {
      Rational v = 0;
      Vec row = row_of(c);
      for (size_t k = 0; k < n; ++k) v += row[k] * (*y)[k];
      if (v < c.rhs) feasible = false;
    }
    if (!feasible) continue;
    Rational d2 = 0;
    for (size_t k = 0; k < n; ++k) {
      Rational diff = (*y)[k] - x0[k];
      d2 += diff * diff;
    }
    if (!best || d2 < best_d2) {
      best = y;
      best_d2 = d2;
    }
  }
  if (!best) throw InfeasibleError("empty feasible set");
  auto out = center;
  for (size_t i = 0; i < n; ++i) out[vars[i]] = (*best)[i];
  return out;
}

namespace {

// A disjunctive constraint: the point must satisfy one of the alternatives.
struct ConstraintGroup {
  std::vector<std::vector<LinearConstraint>> branches;
  std::set<std::string> support;
};

LinearConstraint mu_constraint(const AffineExpr& expr, LinearConstraint::Rel rel,
                               const Rational& bound,
                               const std::set<std::string>& decision,
                               const std::map<std::string, Rational>& point) {
  // Encode μ(x) REL bound over the decision variables, folding the fixed ones
  // into the right-hand side.
  LinearConstraint c;
  c.rel = rel;
  c.rhs = bound - expr.constant;
  for (const auto& [var, coef] : expr.coeffs) {
    if (decision.count(var)) {
      c.coeffs[var] = coef;
    } else {
      auto it = point.find(var);
      if (it == point.end()) throw std::runtime_error("point missing variable '" + var + "'");
      c.rhs -= coef * it->second;
    }
  }
  return c;
}

}  // namespace

ModificationResult modify(const ModificationRequest& req, const Rational& eps) {
  if (eps <= 0) throw std::runtime_error("eps must be positive");
  if (req.fix.empty()) throw std::runtime_error("empty fix set");

  auto find_pred = [&](const std::string& id) -> const Predicate& {
    for (const auto& p : req.preds)
      if (p.id == id) return p;
    throw std::runtime_error("unknown predicate '" + id + "'");
  };

  std::set<std::string> decision;
  for (const auto& id : req.fix) {
    for (const auto& var : find_pred(id).expr.support()) {
      if (!req.point.count(var))
        throw std::runtime_error("point missing variable '" + var + "'");
      decision.insert(var);
    }
  }

  auto bit_of = [&](const std::string& id) {
    auto it = req.action.find(id);
    if (it == req.action.end()) throw std::runtime_error("action missing predicate '" + id + "'");
    return it->second;
  };

  std::vector<ConstraintGroup> groups;
  auto single = [&](LinearConstraint c) {
    ConstraintGroup g;
    for (const auto& [var, coef] : c.coeffs) g.support.insert(var);
    g.branches.push_back({std::move(c)});
    return g;
  };

  for (const auto& id : req.fix) {
    const Predicate& p = find_pred(id);
    bool target = !bit_of(id);
    using Rel = LinearConstraint::Rel;
    switch (p.kind) {
      case PredKind::GE:
        groups.push_back(single(target ? mu_constraint(p.expr, Rel::GE, 0, decision, req.point)
                                       : mu_constraint(p.expr, Rel::LE, -eps, decision, req.point)));
        break;
      case PredKind::GT:
        groups.push_back(single(target ? mu_constraint(p.expr, Rel::GE, eps, decision, req.point)
                                       : mu_constraint(p.expr, Rel::LE, 0, decision, req.point)));
        break;
      case PredKind::EQ:
        if (target) {
          groups.push_back(single(mu_constraint(p.expr, Rel::EQ, 0, decision, req.point)));
        } else {
          ConstraintGroup g;
          g.branches.push_back({mu_constraint(p.expr, Rel::GE, eps, decision, req.point)});
          g.branches.push_back({mu_constraint(p.expr, Rel::LE, -eps, decision, req.point)});
          for (const auto& var : p.expr.support())
            if (decision.count(var)) g.support.insert(var);
          groups.push_back(std::move(g));
        }
        break;
    }
  }

  // Literals outside the fix-set keep their current truth when they share
  // variables with it; margins shrink to the current slack so an already-tight
  // input never forces extra motion.
  for (const auto& q : req.preds) {
    if (req.fix.count(q.id)) continue;
    auto support = q.expr.support();
    bool touches = false;
    for (const auto& var : support)
      if (decision.count(var)) touches = true;
    if (!touches) continue;
    bool bit = bit_of(q.id);
    Rational mu = q.expr.eval(req.point);
    using Rel = LinearConstraint::Rel;
    switch (q.kind) {
      case PredKind::GE:
        if (bit) {
          groups.push_back(single(mu_constraint(q.expr, Rel::GE, 0, decision, req.point)));
        } else {
          Rational m = mu < 0 ? std::min(eps, Rational(-mu)) : Rational(0);
          groups.push_back(single(mu_constraint(q.expr, Rel::LE, -m, decision, req.point)));
        }
        break;
      case PredKind::GT:
        if (bit) {
          Rational m = mu > 0 ? std::min(eps, mu) : Rational(0);
          groups.push_back(single(mu_constraint(q.expr, Rel::GE, m, decision, req.point)));
        } else {
          groups.push_back(single(mu_constraint(q.expr, Rel::LE, 0, decision, req.point)));
        }
        break;
      case PredKind::EQ:
        if (bit) {
          groups.push_back(single(mu_constraint(q.expr, Rel::EQ, 0, decision, req.point)));
        } else if (mu > 0) {
          groups.push_back(single(mu_constraint(q.expr, Rel::GE, std::min(eps, mu), decision,
                                                req.point)));
        } else if (mu < 0) {
          Rational m = std::min(eps, Rational(-mu));
          groups.push_back(single(mu_constraint(q.expr, Rel::LE, Rational(-m), decision,
                                                req.point)));
        }
        // mu == 0 with a false bit marks a boundary instant; the input point
        // itself sits on the zero set, so there is no side to preserve.
        break;
    }
  }

  // Independent connected components (variables linked by shared constraints)
  // solve separately; Euclidean distance decomposes over them.
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> root = [&](const std::string& v) {
    auto it = parent.find(v);
    if (it == parent.end() || it->second == v) return v;
    std::string r = root(it->second);
    parent[v] = r;
    return r;
  };
  for (const auto& var : decision) parent[var] = var;
  for (const auto& g : groups) {
    std::string first;
    for (const auto& var : g.support) {
      if (first.empty()) first = root(var);
      else parent[root(var)] = first;
    }
  }
  std::map<std::string, std::vector<size_t>> comp_groups;  // root → group indices
  std::map<std::string, std::set<std::string>> comp_vars;
  for (const auto& var : decision) comp_vars[root(var)].insert(var);
  for (size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].support.empty()) continue;
    comp_groups[root(*groups[i].support.begin())].push_back(i);
  }

  ModificationResult res;
  res.point = req.point;
  res.distance2 = 0;
  for (const auto& [comp, vars] : comp_vars) {
    std::map<std::string, Rational> center;
    for (const auto& var : vars) center[var] = req.point.at(var);
    const auto& gidx = comp_groups[comp];
    // Cartesian product over the branches of this component's groups.
    std::optional<std::map<std::string, Rational>> best;
    Rational best_d2 = 0;
    std::function<void(size_t, std::vector<LinearConstraint>&)> solve_branches =
        [&](size_t i, std::vector<LinearConstraint>& acc) {
          if (i == gidx.size()) {
            try {
              auto y = solve_qp(center, acc);
              Rational d2 = distance2(center, y);
              if (!best || d2 < best_d2) {
                best = y;
                best_d2 = d2;
              }
            } catch (const InfeasibleError&) {
            }
            return;
          }
          for (const auto& branch : groups[gidx[i]].branches) {
            size_t before = acc.size();
            acc.insert(acc.end(), branch.begin(), branch.end());
            solve_branches(i + 1, acc);
            acc.resize(before);
          }
        };
    std::vector<LinearConstraint> acc;
    solve_branches(0, acc);
    if (!best) throw InfeasibleError("contradictory constraints over " + comp);
    for (const auto& var : vars) {
      Rational nv = best->at(var);
      res.deltas[var] = nv - req.point.at(var);
      res.point[var] = nv;
    }
    res.distance2 += best_d2;
  }
  return res;
}

}  // namespace stlenf
