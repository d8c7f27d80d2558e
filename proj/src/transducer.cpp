#include "stlenf/transducer.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "json.hpp"

namespace stlenf {

std::string guard_op_name(GuardOp op) {
  switch (op) {
    case GuardOp::LT: return "<";
    case GuardOp::LE: return "<=";
    case GuardOp::EQ: return "=";
    case GuardOp::GE: return ">=";
    case GuardOp::GT: return ">";
  }
  return "?";
}

bool guard_satisfied(const Guard& g, const std::map<std::string, Rational>& clocks) {
  for (const auto& atom : g) {
    auto it = clocks.find(atom.clock);
    if (it == clocks.end())
      throw std::runtime_error("guard references unknown clock '" + atom.clock + "'");
    const Rational& v = it->second;
    bool ok = true;
    switch (atom.op) {
      case GuardOp::LT: ok = v < atom.bound; break;
      case GuardOp::LE: ok = v <= atom.bound; break;
      case GuardOp::EQ: ok = v == atom.bound; break;
      case GuardOp::GE: ok = v >= atom.bound; break;
      case GuardOp::GT: ok = v > atom.bound; break;
    }
    if (!ok) return false;
  }
  return true;
}

bool label_matches(const Label& l, const std::map<std::string, bool>& action) {
  for (const auto& [id, required] : l) {
    auto it = action.find(id);
    if (it == action.end())
      throw std::runtime_error("event action missing predicate '" + id + "'");
    if (it->second != required) return false;
  }
  return true;
}

OutputSymbol make_top() { return OutputSymbol{true, {}}; }

OutputSymbol make_bottom(std::set<std::string> fix) {
  if (fix.empty()) throw std::runtime_error("Bottom output with empty fix set");
  return OutputSymbol{false, std::move(fix)};
}

std::vector<const Transition*> TimedTransducer::transitions_from(const std::string& loc) const {
  std::vector<const Transition*> out;
  for (const auto& t : transitions)
    if (t.src == loc) out.push_back(&t);
  return out;
}

const Predicate* TimedTransducer::find_pred(const std::string& id) const {
  for (const auto& p : preds)
    if (p.id == id) return &p;
  return nullptr;
}

TransducerState initial_state(const TimedTransducer& a) {
  TransducerState st;
  st.location = a.initial;
  for (const auto& c : a.clocks) st.clocks[c] = 0;
  st.last_time = 0;
  st.events_seen = 0;
  return st;
}

StepResult make_transition(const TimedTransducer& a, const TransducerState& st,
                           const TimedEvent& ev) {
  if (st.events_seen == 0) {
    if (ev.time < 0) throw TransitionError("out-of-order event: negative timestamp");
  } else if (ev.time <= st.last_time) {
    throw TransitionError("out-of-order event: time " + format_rational(ev.time) +
                          " does not advance past " + format_rational(st.last_time));
  }
  Rational delta = ev.time - st.last_time;
  std::map<std::string, Rational> advanced = st.clocks;
  for (auto& [c, v] : advanced) v += delta;

  const Transition* chosen = nullptr;
  size_t chosen_idx = 0;
  for (size_t i = 0; i < a.transitions.size(); ++i) {
    const Transition& t = a.transitions[i];
    if (t.src != st.location) continue;
    if (!label_matches(t.label, ev.action)) continue;
    if (!guard_satisfied(t.guard, advanced)) continue;
    if (chosen)
      throw TransitionError("ambiguous transition at time " + format_rational(ev.time) +
                            " in location " + st.location);
    chosen = &t;
    chosen_idx = i;
  }
  if (!chosen)
    throw TransitionError("no enabled transition at time " + format_rational(ev.time) +
                          " in location " + st.location);

  StepResult res;
  res.state.location = chosen->dst;
  res.state.clocks = advanced;
  for (const auto& c : chosen->resets) res.state.clocks[c] = 0;
  res.state.last_time = ev.time;
  res.state.events_seen = st.events_seen + 1;
  res.output = chosen->output;
  res.transition_index = chosen_idx;
  return res;
}

RunResult run(const TimedTransducer& a, const TimedWord& w) {
  if (w.events.empty()) throw std::runtime_error("empty timed word");
  RunResult rr;
  TransducerState st = initial_state(a);
  for (size_t i = 0; i < w.events.size(); ++i) {
    const TimedEvent& ev = w.events[i];
    std::string from = st.location;
    StepResult step;
    try {
      step = make_transition(a, st, ev);
    } catch (const TransitionError& e) {
      throw TransitionError("event " + std::to_string(i) + ": " + e.what());
    }
    RunStep rs;
    rs.time = ev.time;
    rs.from = from;
    rs.to = step.state.location;
    // Clock values after advancing to the event (pre-reset), as reported in
    // run traces.
    rs.clocks_after = st.clocks;
    Rational delta = ev.time - st.last_time;
    for (auto& [c, v] : rs.clocks_after) v += delta;
    rs.output = step.output;
    rs.transition_index = step.transition_index;
    rr.steps.push_back(std::move(rs));
    st = step.state;
  }
  rr.final_state = st;
  rr.accepted = a.accepting.count(st.location) > 0;
  return rr;
}

// ---------------------------------------------------------------------------
// Primitive constructions
// ---------------------------------------------------------------------------

namespace {

// Partial label requiring the operand literal to evaluate to `value`.
// nullopt = unsatisfiable (negating the constant true).
std::optional<Label> operand_label(const TemporalOperand& q, bool value) {
  if (!q.pred) return value ? std::optional<Label>(Label{}) : std::nullopt;
  Label l;
  l[q.pred->id] = q.positive ? value : !value;
  return l;
}

std::optional<Label> merge_labels(const std::optional<Label>& a, const std::optional<Label>& b) {
  if (!a || !b) return std::nullopt;
  Label m = *a;
  for (const auto& [k, v] : *b) {
    auto it = m.find(k);
    if (it != m.end() && it->second != v) return std::nullopt;
    m[k] = v;
  }
  return m;
}

std::set<std::string> fix_of(const TemporalOperand& q) {
  std::set<std::string> s;
  if (q.pred) s.insert(q.pred->id);
  return s;
}

std::set<std::string> fix_union(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> s = a;
  s.insert(b.begin(), b.end());
  return s;
}

struct Builder {
  TimedTransducer a;

  // The output is built only for transitions that survive the label check:
  // a Bottom fixing a constant-true operand has an empty fix set, but such
  // transitions always carry an unsatisfiable label and are dropped here
  // before the output would be constructed.
  void add(const std::string& src, const std::optional<Label>& lab, Guard g,
           std::set<std::string> resets, const std::string& dst,
           const std::function<OutputSymbol()>& out) {
    if (!lab) return;  // transition requires ¬true — dropped
    Transition t;
    t.src = src;
    t.label = *lab;
    t.guard = std::move(g);
    t.resets = std::move(resets);
    t.dst = dst;
    t.output = out();
    a.transitions.push_back(std::move(t));
  }

  // Drops locations (and their transitions) unreachable from the initial one.
  void prune_unreachable() {
    std::set<std::string> seen{a.initial};
    std::deque<std::string> work{a.initial};
    while (!work.empty()) {
      std::string loc = work.front();
      work.pop_front();
      for (const auto& t : a.transitions) {
        if (t.src == loc && !seen.count(t.dst)) {
          seen.insert(t.dst);
          work.push_back(t.dst);
        }
      }
    }
    std::vector<std::string> locs;
    for (const auto& l : a.locations)
      if (seen.count(l)) locs.push_back(l);
    a.locations = std::move(locs);
    std::vector<Transition> kept;
    for (auto& t : a.transitions)
      if (seen.count(t.src)) kept.push_back(std::move(t));
    a.transitions = std::move(kept);
    std::set<std::string> acc;
    for (const auto& l : a.accepting)
      if (seen.count(l)) acc.insert(l);
    a.accepting = std::move(acc);
  }
};

void check_operands(const TemporalOperand& q1, const TemporalOperand& q2) {
  if (q1.pred && q2.pred && q1.pred->id == q2.pred->id)
    throw CompileError("temporal operands over the same predicate are not supported");
}

std::vector<Predicate> operand_preds(const TemporalOperand& q1, const TemporalOperand& q2) {
  std::vector<Predicate> ps;
  if (q1.pred) ps.push_back(*q1.pred);
  if (q2.pred) ps.push_back(*q2.pred);
  return ps;
}

}  // namespace

TimedTransducer build_until(const TemporalOperand& q1, const TemporalOperand& q2,
                            const Interval& iv, const std::string& clock) {
  if (iv.lo < 0 || iv.lo > iv.hi) throw std::runtime_error("invalid interval");
  check_operands(q1, q2);
  const Rational& t1 = iv.lo;
  const Rational& t2 = iv.hi;

  Builder b;
  b.a.locations = {"l0", "l1", "l2", "l3"};
  b.a.initial = "l0";
  b.a.accepting = {"l2"};
  b.a.clocks = {clock};
  b.a.preds = operand_preds(q1, q2);

  auto T = [&](bool v) { return operand_label(q1, v); };
  auto S = [&](bool v) { return operand_label(q2, v); };
  auto top = [] { return make_top(); };
  auto bot1 = [&] { return make_bottom(fix_of(q1)); };
  auto bot2 = [&] { return make_bottom(fix_of(q2)); };
  auto bot12 = [&] { return make_bottom(fix_union(fix_of(q1), fix_of(q2))); };

  Guard none{};
  Guard before{{clock, GuardOp::LT, t1}};
  Guard at_lo{{clock, GuardOp::EQ, t1}};
  Guard inside{{clock, GuardOp::GE, t1}, {clock, GuardOp::LT, t2}};
  Guard window{{clock, GuardOp::GE, t1}, {clock, GuardOp::LE, t2}};
  Guard at_hi{{clock, GuardOp::EQ, t2}};

  if (t1 == 0) {
    // The witness window opens at the very first event: the initial location
    // carries the decision that the c=t1 edges make in the general machine.
    if (t2 == 0) {
      b.add("l0", merge_labels(T(true), S(true)), none, {clock}, "l2", top);
      b.add("l0", merge_labels(T(false), S(true)), none, {clock}, "l2", bot1);
      b.add("l0", merge_labels(T(true), S(false)), none, {clock}, "l2", bot2);
      b.add("l0", merge_labels(T(false), S(false)), none, {clock}, "l2", bot12);
    } else {
      b.add("l0", merge_labels(T(true), S(true)), none, {clock}, "l2", top);
      b.add("l0", merge_labels(T(false), S(true)), none, {clock}, "l2", bot1);
      b.add("l0", merge_labels(T(true), S(false)), none, {clock}, "l3", top);
      b.add("l0", merge_labels(T(false), S(false)), none, {clock}, "l3", bot1);
    }
  } else {
    b.add("l0", T(true), none, {clock}, "l1", top);
    b.add("l0", T(false), none, {clock}, "l1", bot1);
    b.add("l1", T(true), before, {}, "l1", top);
    b.add("l1", T(false), before, {}, "l1", bot1);
    if (t1 == t2) {
      // Punctual window: the c=t1 step decides everything.
      b.add("l1", merge_labels(T(true), S(true)), at_lo, {}, "l2", top);
      b.add("l1", merge_labels(T(false), S(true)), at_lo, {}, "l2", bot1);
      b.add("l1", merge_labels(T(true), S(false)), at_lo, {}, "l2", bot2);
      b.add("l1", merge_labels(T(false), S(false)), at_lo, {}, "l2", bot12);
    } else {
      b.add("l1", merge_labels(T(true), S(true)), at_lo, {}, "l2", top);
      b.add("l1", merge_labels(T(false), S(true)), at_lo, {}, "l2", bot1);
      b.add("l1", merge_labels(T(true), S(false)), at_lo, {}, "l3", top);
      b.add("l1", merge_labels(T(false), S(false)), at_lo, {}, "l3", bot1);
    }
  }
  if (t1 < t2) {
    b.add("l3", merge_labels(T(true), S(false)), inside, {}, "l3", top);
    b.add("l3", merge_labels(T(false), S(false)), inside, {}, "l3", bot1);
    b.add("l3", merge_labels(T(true), S(true)), window, {}, "l2", top);
    b.add("l3", merge_labels(T(false), S(true)), window, {}, "l2", bot1);
    b.add("l3", merge_labels(T(true), S(false)), at_hi, {}, "l2", bot2);
    b.add("l3", merge_labels(T(false), S(false)), at_hi, {}, "l2", bot12);
  }
  b.add("l2", Label{}, none, {}, "l2", top);

  b.prune_unreachable();
  return std::move(b.a);
}

TimedTransducer build_release(const TemporalOperand& q1, const TemporalOperand& q2,
                              const Interval& iv, const std::string& clock) {
  if (iv.lo < 0 || iv.lo > iv.hi) throw std::runtime_error("invalid interval");
  check_operands(q1, q2);
  const Rational& t1 = iv.lo;
  const Rational& t2 = iv.hi;

  Builder b;
  b.a.locations = {"l0", "l1", "l2", "l3"};
  b.a.initial = "l0";
  b.a.accepting = {"l2"};
  b.a.clocks = {clock};
  b.a.preds = operand_preds(q1, q2);

  auto T = [&](bool v) { return operand_label(q1, v); };
  auto S = [&](bool v) { return operand_label(q2, v); };
  auto top = [] { return make_top(); };
  auto bot2 = [&] { return make_bottom(fix_of(q2)); };

  Guard none{};
  Guard before{{clock, GuardOp::LT, t1}};
  Guard at_lo{{clock, GuardOp::EQ, t1}};
  Guard inside{{clock, GuardOp::GE, t1}, {clock, GuardOp::LT, t2}};
  Guard window{{clock, GuardOp::GE, t1}, {clock, GuardOp::LE, t2}};
  Guard at_hi{{clock, GuardOp::EQ, t2}};

  if (t1 == 0) {
    // The obligation window opens immediately; the initial event decides.
    b.add("l0", T(true), none, {}, "l2", top);
    if (t2 == 0) {
      b.add("l0", merge_labels(T(false), S(true)), none, {clock}, "l2", top);
      b.add("l0", merge_labels(T(false), S(false)), none, {clock}, "l2", bot2);
    } else {
      b.add("l0", merge_labels(T(false), S(true)), none, {clock}, "l3", top);
      b.add("l0", merge_labels(T(false), S(false)), none, {clock}, "l3", bot2);
    }
  } else {
    b.add("l0", T(false), none, {clock}, "l1", top);
    b.add("l0", T(true), none, {}, "l2", top);
    b.add("l1", T(false), before, {}, "l1", top);
    b.add("l1", T(true), before, {}, "l2", top);
    const std::string mid = (t1 == t2) ? "l2" : "l3";
    b.add("l1", merge_labels(T(true), S(true)), at_lo, {}, "l2", top);
    b.add("l1", merge_labels(T(true), S(false)), at_lo, {}, "l2", bot2);
    b.add("l1", merge_labels(T(false), S(true)), at_lo, {}, mid, top);
    b.add("l1", merge_labels(T(false), S(false)), at_lo, {}, mid, bot2);
  }
  if (t1 < t2) {
    b.add("l3", merge_labels(T(false), S(false)), inside, {}, "l3", bot2);
    b.add("l3", merge_labels(T(false), S(true)), inside, {}, "l3", top);
    b.add("l3", merge_labels(T(true), S(true)), window, {}, "l2", top);
    b.add("l3", merge_labels(T(true), S(false)), window, {}, "l2", bot2);
    b.add("l3", merge_labels(T(false), S(false)), at_hi, {}, "l2", bot2);
    b.add("l3", merge_labels(T(false), S(true)), at_hi, {}, "l2", top);
  }
  b.add("l2", Label{}, none, {}, "l2", top);

  b.prune_unreachable();
  return std::move(b.a);
}

TimedTransducer build_until(const Predicate& p1, const Predicate& p2, const Interval& iv) {
  return build_until(TemporalOperand::atom(p1), TemporalOperand::atom(p2), iv);
}

TimedTransducer build_release(const Predicate& p1, const Predicate& p2, const Interval& iv) {
  return build_release(TemporalOperand::atom(p1), TemporalOperand::atom(p2), iv);
}

TimedTransducer build_top() {
  TimedTransducer a;
  a.locations = {"t0"};
  a.initial = "t0";
  a.accepting = {"t0"};
  Transition t;
  t.src = "t0";
  t.dst = "t0";
  t.output = make_top();
  a.transitions.push_back(std::move(t));
  return a;
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

namespace {

struct PairKey {
  std::string la, lb;
  int fa = 0, fb = 0;  // 0 = viable, 1 = failed (Or products only)

  bool operator<(const PairKey& o) const {
    return std::tie(la, lb, fa, fb) < std::tie(o.la, o.lb, o.fa, o.fb);
  }
};

std::string pair_name(const PairKey& k, ProductOp op) {
  if (op == ProductOp::And) return "(" + k.la + "," + k.lb + ")";
  return "(" + k.la + (k.fa ? "!" : "") + "," + k.lb + (k.fb ? "!" : "") + ")";
}

void rename_clock(TimedTransducer& a, const std::string& from, const std::string& to) {
  for (auto& c : a.clocks)
    if (c == from) c = to;
  for (auto& t : a.transitions) {
    for (auto& g : t.guard)
      if (g.clock == from) g.clock = to;
    if (t.resets.erase(from)) t.resets.insert(to);
  }
}

}  // namespace

TimedTransducer product(const TimedTransducer& a, const TimedTransducer& b, ProductOp op,
                        bool prune) {
  TimedTransducer rb = b;
  {
    std::set<std::string> used(a.clocks.begin(), a.clocks.end());
    for (const auto& c : rb.clocks) used.insert(c);
    std::vector<std::string> bclocks = rb.clocks;
    for (const auto& c : bclocks) {
      if (std::find(a.clocks.begin(), a.clocks.end(), c) == a.clocks.end()) continue;
      std::string fresh = c;
      do {
        fresh += "'";
      } while (used.count(fresh));
      used.insert(fresh);
      rename_clock(rb, c, fresh);
    }
  }

  TimedTransducer out;
  out.clocks = a.clocks;
  out.clocks.insert(out.clocks.end(), rb.clocks.begin(), rb.clocks.end());
  out.preds = a.preds;
  for (const auto& p : rb.preds) {
    const Predicate* existing = nullptr;
    for (const auto& q : out.preds)
      if (q.id == p.id) existing = &q;
    if (existing) {
      if (!existing->same_shape(p))
        throw std::runtime_error("predicate id '" + p.id + "' names different predicates");
    } else {
      out.preds.push_back(p);
    }
  }

  // Enumerate product locations: reachable by worklist, or all combinations
  // when prune is off.
  std::vector<PairKey> keys;
  std::set<PairKey> seen;
  std::deque<PairKey> work;
  auto discover = [&](const PairKey& k) {
    if (seen.insert(k).second) {
      keys.push_back(k);
      work.push_back(k);
    }
  };
  PairKey init{a.initial, rb.initial, 0, 0};
  if (prune) {
    discover(init);
  } else {
    for (const auto& la : a.locations)
      for (const auto& lb : rb.locations) {
        if (op == ProductOp::And) {
          discover(PairKey{la, lb, 0, 0});
        } else {
          discover(PairKey{la, lb, 0, 0});
          discover(PairKey{la, lb, 0, 1});
          discover(PairKey{la, lb, 1, 0});
        }
      }
  }

  std::vector<Transition> transitions;
  std::set<PairKey> processed;
  while (!work.empty()) {
    PairKey k = work.front();
    work.pop_front();
    if (!processed.insert(k).second) continue;
    for (const Transition* t1 : a.transitions_from(k.la)) {
      for (const Transition* t2 : rb.transitions_from(k.lb)) {
        auto lab = merge_labels(t1->label, t2->label);
        if (!lab) continue;  // contradictory literal demands — pair omitted
        Transition t;
        t.src = pair_name(k, op);
        t.label = *lab;
        t.guard = t1->guard;
        t.guard.insert(t.guard.end(), t2->guard.begin(), t2->guard.end());
        t.resets = t1->resets;
        t.resets.insert(t2->resets.begin(), t2->resets.end());

        PairKey dst{t1->dst, t2->dst, k.fa, k.fb};
        if (op == ProductOp::And) {
          if (t1->output.top && t2->output.top) {
            t.output = make_top();
          } else {
            std::set<std::string> fix = fix_union(t1->output.fix, t2->output.fix);
            t.output = make_bottom(std::move(fix));
          }
        } else {
          bool viable1 = k.fa == 0, viable2 = k.fb == 0;
          bool top1 = viable1 && t1->output.top;
          bool top2 = viable2 && t2->output.top;
          if (top1 || top2) {
            // Some viable side proceeds without correction; a viable side
            // that output Bottom alongside it is now unsalvageable.
            t.output = make_top();
            dst.fa = viable1 ? (t1->output.top ? 0 : 1) : 1;
            dst.fb = viable2 ? (t2->output.top ? 0 : 1) : 1;
          } else {
            // Every viable side asks for a fix; applying it keeps them viable.
            std::set<std::string> fix;
            if (viable1) fix = fix_union(fix, t1->output.fix);
            if (viable2) fix = fix_union(fix, t2->output.fix);
            t.output = make_bottom(std::move(fix));
          }
        }
        t.dst = pair_name(dst, op);
        if (prune) discover(dst);
        else if (!seen.count(dst)) {
          // Without pruning an Or target may name a yet-unlisted viability
          // combination; list it so the machine stays closed.
          discover(dst);
        }
        transitions.push_back(std::move(t));
      }
    }
  }

  for (const auto& k : keys) {
    out.locations.push_back(pair_name(k, op));
    bool acc;
    if (op == ProductOp::And)
      acc = a.accepting.count(k.la) && rb.accepting.count(k.lb);
    else
      acc = (k.fa == 0 && a.accepting.count(k.la)) || (k.fb == 0 && rb.accepting.count(k.lb));
    if (acc) out.accepting.insert(pair_name(k, op));
  }
  out.initial = pair_name(init, op);
  if (!prune && std::find(out.locations.begin(), out.locations.end(), out.initial) ==
                    out.locations.end()) {
    out.locations.push_back(out.initial);
  }
  out.transitions = std::move(transitions);
  return out;
}

// ---------------------------------------------------------------------------
// Formula compilation
// ---------------------------------------------------------------------------

namespace {

bool has_temporal(const FormulaNode& n) {
  if (n.kind == NodeKind::Until || n.kind == NodeKind::Release) return true;
  for (const auto& c : n.children)
    if (has_temporal(*c)) return true;
  return false;
}

TemporalOperand to_operand(const StlFormula& f, const FormulaNode& n) {
  switch (n.kind) {
    case NodeKind::True: return TemporalOperand::top();
    case NodeKind::Lit: return TemporalOperand::atom(f.pred(n.pred), n.positive);
    default:
      throw CompileError(
          "temporal operand is not a literal: composite operands are not supported by the "
          "transducer construction");
  }
}

TimedTransducer compile_node(const StlFormula& f, const FormulaNode& n, int& clock_counter) {
  switch (n.kind) {
    case NodeKind::True: return build_top();
    case NodeKind::Until:
    case NodeKind::Release: {
      std::string clock = "c" + std::to_string(clock_counter++);
      TemporalOperand q1 = to_operand(f, *n.children[0]);
      TemporalOperand q2 = to_operand(f, *n.children[1]);
      return n.kind == NodeKind::Until ? build_until(q1, q2, n.interval, clock)
                                       : build_release(q1, q2, n.interval, clock);
    }
    case NodeKind::And:
    case NodeKind::Or: {
      ProductOp op = n.kind == NodeKind::And ? ProductOp::And : ProductOp::Or;
      TimedTransducer acc = compile_node(f, *n.children[0], clock_counter);
      for (size_t i = 1; i < n.children.size(); ++i)
        acc = product(acc, compile_node(f, *n.children[i], clock_counter), op);
      return acc;
    }
    case NodeKind::Lit:
      throw CompileError("bare literal at formula top level is not supported");
  }
  throw CompileError("unsupported formula node");
}

}  // namespace

TimedTransducer compile(const StlFormula& phi) {
  if (!has_temporal(*phi.root)) throw CompileError("formula with no temporal term");
  int clock_counter = 0;
  TimedTransducer a = compile_node(phi, *phi.root, clock_counter);
  // The word carries a column for every formula predicate; keep the machine's
  // universe aligned even when a pruned layer drops one.
  a.preds = phi.preds;
  return a;
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

namespace {

// Representative clock values for every region induced by the guards of the
// given transitions: each bound, midpoints between consecutive bounds, a point
// below the smallest and one beyond the largest.
std::map<std::string, std::vector<Rational>> clock_sample_points(
    const TimedTransducer& a, const std::vector<const Transition*>& ts) {
  std::map<std::string, std::set<Rational>> bounds;
  for (const auto& c : a.clocks) bounds[c];  // ensure every clock is sampled
  for (const Transition* t : ts)
    for (const auto& g : t->guard) bounds[g.clock].insert(g.bound);
  std::map<std::string, std::vector<Rational>> out;
  for (const auto& [clock, bs] : bounds) {
    std::vector<Rational> pts;
    pts.push_back(0);
    Rational prev = 0;
    for (const Rational& b : bs) {
      if (b > prev) pts.push_back(prev + (b - prev) / 2);
      pts.push_back(b);
      prev = b;
    }
    pts.push_back(prev + 1);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    out[clock] = std::move(pts);
  }
  return out;
}

void for_each_clock_valuation(const std::map<std::string, std::vector<Rational>>& samples,
                              const std::function<void(const std::map<std::string, Rational>&)>& f) {
  std::vector<std::string> clocks;
  for (const auto& [c, pts] : samples) clocks.push_back(c);
  std::map<std::string, Rational> v;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == clocks.size()) {
      f(v);
      return;
    }
    for (const Rational& p : samples.at(clocks[i])) {
      v[clocks[i]] = p;
      rec(i + 1);
    }
  };
  rec(0);
}

void for_each_valuation(const std::vector<Predicate>& preds,
                        const std::function<void(const std::map<std::string, bool>&)>& f) {
  std::map<std::string, bool> v;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == preds.size()) {
      f(v);
      return;
    }
    for (bool bit : {false, true}) {
      v[preds[i].id] = bit;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace

void verify_deterministic(const TimedTransducer& a) {
  for (const auto& loc : a.locations) {
    auto ts = a.transitions_from(loc);
    auto samples = clock_sample_points(a, ts);
    for_each_valuation(a.preds, [&](const std::map<std::string, bool>& action) {
      for_each_clock_valuation(samples, [&](const std::map<std::string, Rational>& clocks) {
        int enabled = 0;
        for (const Transition* t : ts)
          if (label_matches(t->label, action) && guard_satisfied(t->guard, clocks)) ++enabled;
        if (enabled > 1)
          throw std::runtime_error("determinism violation in location " + loc);
      });
    });
  }
}

void verify_self_correcting(const TimedTransducer& a) {
  for (const auto& delta : a.transitions) {
    if (delta.output.top) continue;
    Label flipped = delta.label;
    for (const auto& id : delta.output.fix) {
      auto it = flipped.find(id);
      if (it == flipped.end())
        throw std::runtime_error("fix set names predicate '" + id +
                                 "' unconstrained by the transition label");
      it->second = !it->second;
    }
    auto ts = a.transitions_from(delta.src);
    auto samples = clock_sample_points(a, ts);
    for_each_valuation(a.preds, [&](const std::map<std::string, bool>& action) {
      if (!label_matches(flipped, action)) return;
      for_each_clock_valuation(samples, [&](const std::map<std::string, Rational>& clocks) {
        if (!guard_satisfied(delta.guard, clocks)) return;
        const Transition* twin = nullptr;
        for (const Transition* t : ts) {
          if (!label_matches(t->label, action) || !guard_satisfied(t->guard, clocks)) continue;
          if (twin) throw std::runtime_error("ambiguous twin in location " + delta.src);
          twin = t;
        }
        if (!twin)
          throw std::runtime_error("no corrected twin for a Bottom transition in location " +
                                   delta.src);
        if (!twin->output.top)
          throw std::runtime_error("corrected twin is not Top in location " + delta.src);
        if (twin->dst != delta.dst)
          throw std::runtime_error("corrected twin changes target: " + delta.dst + " vs " +
                                   twin->dst);
      });
    });
  }
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json pred_to_json(const Predicate& p) {
  json coeffs = json::object();
  for (const auto& [var, c] : p.expr.coeffs) coeffs[var] = format_rational(c);
  std::string op = p.kind == PredKind::GE ? "GE" : (p.kind == PredKind::GT ? "GT" : "EQ");
  return json{{"id", p.id}, {"op", op}, {"coeffs", coeffs},
              {"const", format_rational(p.expr.constant)}};
}

Predicate pred_from_json(const json& j) {
  Predicate p;
  p.id = j.at("id").get<std::string>();
  std::string op = j.at("op").get<std::string>();
  if (op == "GE") p.kind = PredKind::GE;
  else if (op == "GT") p.kind = PredKind::GT;
  else if (op == "EQ") p.kind = PredKind::EQ;
  else throw std::runtime_error("transducer schema violation: bad predicate op '" + op + "'");
  for (const auto& [var, c] : j.at("coeffs").items())
    p.expr.coeffs[var] = parse_rational(c.get<std::string>());
  p.expr.constant = parse_rational(j.at("const").get<std::string>());
  return p;
}

GuardOp guard_op_from_name(const std::string& s) {
  if (s == "<") return GuardOp::LT;
  if (s == "<=") return GuardOp::LE;
  if (s == "=") return GuardOp::EQ;
  if (s == ">=") return GuardOp::GE;
  if (s == ">") return GuardOp::GT;
  throw std::runtime_error("transducer schema violation: bad guard op '" + s + "'");
}

}  // namespace

std::string to_json(const TimedTransducer& a) {
  json j;
  j["locations"] = a.locations;
  j["initial"] = a.initial;
  j["accepting"] = std::vector<std::string>(a.accepting.begin(), a.accepting.end());
  j["clocks"] = a.clocks;
  j["predicates"] = json::array();
  for (const auto& p : a.preds) j["predicates"].push_back(pred_to_json(p));
  j["transitions"] = json::array();
  for (const auto& t : a.transitions) {
    json jt;
    jt["src"] = t.src;
    jt["label"] = json::object();
    for (const auto& [id, v] : t.label) jt["label"][id] = v;
    jt["guard"] = json::array();
    for (const auto& g : t.guard)
      jt["guard"].push_back(json{{"clock", g.clock},
                                 {"op", guard_op_name(g.op)},
                                 {"bound", format_rational(g.bound)}});
    jt["resets"] = std::vector<std::string>(t.resets.begin(), t.resets.end());
    jt["dst"] = t.dst;
    jt["output"] = json{{"top", t.output.top},
                        {"fix", std::vector<std::string>(t.output.fix.begin(),
                                                         t.output.fix.end())}};
    j["transitions"].push_back(std::move(jt));
  }
  return j.dump(2);
}

TimedTransducer transducer_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("transducer schema violation: ") + e.what());
  }
  try {
    TimedTransducer a;
    a.locations = j.at("locations").get<std::vector<std::string>>();
    a.initial = j.at("initial").get<std::string>();
    for (const auto& l : j.at("accepting")) a.accepting.insert(l.get<std::string>());
    a.clocks = j.at("clocks").get<std::vector<std::string>>();
    for (const auto& p : j.at("predicates")) a.preds.push_back(pred_from_json(p));
    std::set<std::string> locs(a.locations.begin(), a.locations.end());
    if (!locs.count(a.initial))
      throw std::runtime_error("initial location not listed");
    for (const auto& jt : j.at("transitions")) {
      Transition t;
      t.src = jt.at("src").get<std::string>();
      t.dst = jt.at("dst").get<std::string>();
      if (!locs.count(t.src) || !locs.count(t.dst))
        throw std::runtime_error("transition endpoint not listed");
      for (const auto& [id, v] : jt.at("label").items()) {
        if (v.is_string() && v.get<std::string>() == "*") continue;  // unconstrained
        t.label[id] = v.get<bool>();
      }
      for (const auto& jg : jt.at("guard")) {
        GuardAtom g;
        g.clock = jg.at("clock").get<std::string>();
        g.op = guard_op_from_name(jg.at("op").get<std::string>());
        g.bound = parse_rational(jg.at("bound").get<std::string>());
        t.guard.push_back(std::move(g));
      }
      for (const auto& r : jt.at("resets")) t.resets.insert(r.get<std::string>());
      t.output.top = jt.at("output").at("top").get<bool>();
      for (const auto& f : jt.at("output").at("fix")) t.output.fix.insert(f.get<std::string>());
      if (!t.output.top && t.output.fix.empty())
        throw std::runtime_error("Bottom output with empty fix set");
      if (t.output.top && !t.output.fix.empty())
        throw std::runtime_error("Top output with nonempty fix set");
      a.transitions.push_back(std::move(t));
    }
    return a;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("transducer schema violation: ") + e.what());
  }
}

}  // namespace stlenf
