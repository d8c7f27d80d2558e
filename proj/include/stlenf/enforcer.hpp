#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stlenf/encoder.hpp"
#include "stlenf/modifier.hpp"
#include "stlenf/signal.hpp"
#include "stlenf/stl.hpp"
#include "stlenf/transducer.hpp"

namespace stlenf {

struct ModificationRecord {
  std::map<std::string, Rational> old_values;
  std::map<std::string, Rational> new_values;
  Rational distance2;

  double distance() const;
};

struct EventRecord {
  Rational time;
  std::map<std::string, bool> action;
  std::string from, to;
  std::map<std::string, Rational> clocks;  // clock values when the event fired
  OutputSymbol output;
  std::optional<ModificationRecord> modification;
};

struct EnforcementReport {
  std::vector<EventRecord> events;
  bool accepted = false;
  int modified_count = 0;
};

struct EnforcementResult {
  Signal output;
  EnforcementReport report;
};

std::string report_to_json(const EnforcementReport& r);

// Incremental enforcement over one signal: push the events of its encoded
// word in time order; each push returns the decision for that event, and the
// correction window opened by a Bottom output materializes once the next
// event (or finish) bounds it.
class EnforceSession {
 public:
  EnforceSession(const Signal& s, const StlFormula& phi, const Rational& eps);

  const EventRecord& push(const TimedEvent& ev);
  EnforcementResult finish();

 private:
  void materialize_window(const Rational& upto, bool include_end);
  Rational project_sample(const Rational& t, const std::map<std::string, bool>& action,
                          const std::set<std::string>& fix);

  Signal input_;
  StlFormula phi_;
  Rational eps_;
  TimedTransducer machine_;
  TransducerState state_;
  EnforcementReport report_;
  std::map<Rational, std::map<std::string, Rational>> out_;          // time → values
  std::optional<size_t> pending_;                                    // open Bottom window
  std::map<std::string, std::vector<Rational>> variable_points_;     // per predicate id
  bool finished_ = false;
};

// Batch enforcement: encode, run the transducer, repair every violation
// window. Satisfying inputs pass through bit-identical.
EnforcementResult enforce(const Signal& s, const StlFormula& phi, const Rational& eps);

}  // namespace stlenf
