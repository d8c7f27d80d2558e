#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "stlenf/signal.hpp"
#include "stlenf/stl.hpp"

namespace stlenf {

// Sign analysis of one affine expression along a piecewise-linear signal.
// times cover [0, duration] (every sample time plus every interior zero
// crossing); interval_sign[i] is the constant sign of mu on the open interval
// (times[i], times[i+1]): -1, 0 (identically zero) or +1.
struct TruthProfile {
  std::vector<Rational> times;
  std::vector<Rational> mu;
  std::vector<int> interval_sign;

  bool has_before(const Rational& t) const { return t > times.front(); }
  bool has_after(const Rational& t) const { return t < times.back(); }
  // Sign of mu immediately before / after t (t inside [0, duration]).
  int sign_before(const Rational& t) const;
  int sign_after(const Rational& t) const;
  Rational mu_at(const Rational& t) const;
};

TruthProfile build_profile(const Signal& s, const AffineExpr& expr);

// Truth of a predicate kind on an interval of constant sign.
bool truth_of_sign(PredKind k, int sign);
bool truth_of_value(PredKind k, const Rational& mu);

// Instants strictly inside (0, duration) where the predicate's truth along the
// signal changes. For GT this includes single-instant violations (mu touching
// 0 from above); for EQ these are the boundary instants of the zero set
// (isolated zeros and plateau entries/exits).
std::vector<Rational> variable_points(const Signal& s, const Predicate& p);

enum class EventKind { VariablePoint, RelevantPoint, Both };

std::string event_kind_name(EventKind k);

// One letter of the timed word: the predicate valuation sampled at `time`.
struct TimedEvent {
  Rational time;
  std::map<std::string, bool> action;  // predicate id -> truth bit
  EventKind kind = EventKind::RelevantPoint;
};

struct TimedWord {
  std::vector<std::string> predicate_ids;  // column order
  std::vector<TimedEvent> events;

  size_t length() const { return events.size(); }
};

// Encodes the signal into the timed word read by the transducer: events at
// t=0, at every relevant point of the formula and at every variable point of
// its predicates. A positive `lead` additionally emits anticipatory events at
// max(0, t - lead) for every base event time t. Throws HorizonError when the
// signal is shorter than the formula horizon.
TimedWord sign_encode(const Signal& s, const StlFormula& phi, const Rational& lead = Rational(0));

// CSV dump: header "time,kind,p1,...,pk"; bits as 0/1.
void emit_word_csv(const TimedWord& w, std::ostream& out);

}  // namespace stlenf
