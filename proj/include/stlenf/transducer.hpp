#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stlenf/encoder.hpp"
#include "stlenf/stl.hpp"

namespace stlenf {

enum class GuardOp { LT, LE, EQ, GE, GT };

std::string guard_op_name(GuardOp op);

struct GuardAtom {
  std::string clock;
  GuardOp op = GuardOp::EQ;
  Rational bound;
};

// Conjunction of clock constraints; empty guard is always satisfied.
using Guard = std::vector<GuardAtom>;

bool guard_satisfied(const Guard& g, const std::map<std::string, Rational>& clocks);

// Partial predicate-valuation requirement; empty map is Sigma (matches all).
using Label = std::map<std::string, bool>;

bool label_matches(const Label& l, const std::map<std::string, bool>& action);

struct OutputSymbol {
  bool top = true;
  std::set<std::string> fix;  // nonempty iff !top

  bool operator==(const OutputSymbol& o) const { return top == o.top && fix == o.fix; }
};

OutputSymbol make_top();
OutputSymbol make_bottom(std::set<std::string> fix);

struct Transition {
  std::string src;
  Label label;
  Guard guard;
  std::set<std::string> resets;
  std::string dst;
  OutputSymbol output;
};

struct TimedTransducer {
  std::vector<std::string> locations;
  std::string initial;
  std::set<std::string> accepting;
  std::vector<std::string> clocks;
  std::vector<Predicate> preds;  // input predicate universe
  std::vector<Transition> transitions;

  std::vector<const Transition*> transitions_from(const std::string& loc) const;
  const Predicate* find_pred(const std::string& id) const;
};

struct TransducerState {
  std::string location;
  std::map<std::string, Rational> clocks;
  Rational last_time = 0;
  long events_seen = 0;
};

TransducerState initial_state(const TimedTransducer& a);

struct StepResult {
  TransducerState state;
  OutputSymbol output;
  size_t transition_index;  // into TimedTransducer::transitions
};

// Advances clocks to ev.time, takes the unique enabled transition and applies
// its resets. Throws TransitionError ("no enabled transition" /
// "ambiguous transition" / "out-of-order event").
StepResult make_transition(const TimedTransducer& a, const TransducerState& st,
                           const TimedEvent& ev);

struct RunStep {
  Rational time;
  std::string from;
  std::string to;
  std::map<std::string, Rational> clocks_after;  // before resets are applied
  OutputSymbol output;
  size_t transition_index;
};

struct RunResult {
  std::vector<RunStep> steps;
  TransducerState final_state;
  bool accepted = false;

  bool all_top() const {
    for (const auto& s : steps)
      if (!s.output.top) return false;
    return true;
  }
};

RunResult run(const TimedTransducer& a, const TimedWord& w);

// One temporal operand: a predicate literal or the constant true.
struct TemporalOperand {
  std::optional<Predicate> pred;  // nullopt = "true"
  bool positive = true;

  static TemporalOperand top() { return {}; }
  static TemporalOperand atom(Predicate p, bool positive = true) {
    TemporalOperand q;
    q.pred = std::move(p);
    q.positive = positive;
    return q;
  }
};

// The published four-location machines. Location names l0..l3 (unreachable
// layers of degenerate intervals are pruned); F = {l2}; one clock.
TimedTransducer build_until(const TemporalOperand& q1, const TemporalOperand& q2,
                            const Interval& iv, const std::string& clock = "c");
TimedTransducer build_release(const TemporalOperand& q1, const TemporalOperand& q2,
                              const Interval& iv, const std::string& clock = "c");
TimedTransducer build_until(const Predicate& p1, const Predicate& p2, const Interval& iv);
TimedTransducer build_release(const Predicate& p1, const Predicate& p2, const Interval& iv);

// Single accepting location absorbing everything with Top.
TimedTransducer build_top();

enum class ProductOp { And, Or };

// Synchronous product. And: Top iff both Top, accepting = both accepting.
// Or: location carries per-side viability; Top iff a viable side is Top (a
// viable side outputting Bottom alongside it is marked failed), otherwise
// Bottom with the viable sides' fixes; accepting = some viable side accepting.
// Clocks are renamed apart automatically; label-conflicting pairs are omitted;
// locations are pruned to those reachable from the initial pair unless
// prune=false.
TimedTransducer product(const TimedTransducer& a, const TimedTransducer& b, ProductOp op,
                        bool prune = true);

// Folds build_until/build_release/product over the formula structure.
// Temporal operands must be literals or 'true'.
TimedTransducer compile(const StlFormula& phi);

// Structural checks (used by the test suites).
// Determinism: at most one enabled transition for every (location, full
// valuation, clock region sample point).
void verify_deterministic(const TimedTransducer& a);
// Self-correction: every Bottom(S) transition has, after flipping exactly the
// S literals of its label, a unique enabled Top twin with the same source,
// same guard region and same target.
void verify_self_correcting(const TimedTransducer& a);

// JSON serialization (schema with locations/initial/accepting/clocks/
// predicates/transitions); round-trip identity.
std::string to_json(const TimedTransducer& a);
TimedTransducer transducer_from_json(const std::string& text);

}  // namespace stlenf
