#include "stlenf/enforcer.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "stlenf/errors.hpp"

namespace stlenf {

double ModificationRecord::distance() const { return std::sqrt(to_double(distance2)); }

EnforceSession::EnforceSession(const Signal& s, const StlFormula& phi, const Rational& eps)
    : input_(s), phi_(phi), eps_(eps), machine_(compile(phi)), state_(initial_state(machine_)) {
  if (eps_ <= 0) throw std::runtime_error("eps must be positive");
  for (const auto& [t, values] : s.samples) {
    auto& row = out_[t];
    for (size_t i = 0; i < s.variables.size(); ++i) row[s.variables[i]] = values[i];
  }
  for (const auto& p : phi.preds) variable_points_[p.id] = variable_points(s, p);
}

Rational EnforceSession::project_sample(const Rational& t,
                                        const std::map<std::string, bool>& action,
                                        const std::set<std::string>& fix) {
  ModificationRequest req;
  req.point = out_.at(t);
  req.action = action;
  req.fix = fix;
  req.preds = machine_.preds;
  ModificationResult m = modify(req, eps_);
  out_[t] = m.point;
  return m.distance2;
}

void EnforceSession::materialize_window(const Rational& upto, bool include_end) {
  if (!pending_) return;
  const EventRecord& ev = report_.events[*pending_];
  auto lo = out_.upper_bound(ev.time);
  for (auto it = lo; it != out_.end() && (it->first < upto); ++it)
    project_sample(it->first, ev.action, ev.output.fix);
  if (include_end) {
    auto it = out_.find(upto);
    if (it != out_.end() && upto > ev.time)
      project_sample(upto, ev.action, ev.output.fix);
  } else {
    // The window is right-open, but a fixed predicate whose truth profile has
    // a variable point exactly at the boundary can leave the boundary sample
    // on the wrong side of a strict threshold; project it too (a no-op unless
    // the value actually violates).
    bool boundary = false;
    for (const auto& id : ev.output.fix) {
      const auto& vps = variable_points_.at(id);
      if (std::binary_search(vps.begin(), vps.end(), upto)) boundary = true;
    }
    if (boundary && out_.count(upto)) project_sample(upto, ev.action, ev.output.fix);
  }
  pending_.reset();
}

const EventRecord& EnforceSession::push(const TimedEvent& ev) {
  if (finished_) throw std::runtime_error("session already finished");
  StepResult step = make_transition(machine_, state_, ev);

  if (!out_.count(ev.time)) {
    auto& row = out_[ev.time];
    for (const auto& [var, val] : input_.point_at(ev.time)) row[var] = val;
  }
  materialize_window(ev.time, false);

  EventRecord rec;
  rec.time = ev.time;
  rec.action = ev.action;
  rec.from = state_.location;
  rec.to = step.state.location;
  rec.clocks = state_.clocks;
  Rational delta = ev.time - state_.last_time;
  for (auto& [c, v] : rec.clocks) v += delta;
  rec.output = step.output;

  if (!step.output.top) {
    ModificationRequest req;
    req.point = out_.at(ev.time);
    req.action = ev.action;
    req.fix = step.output.fix;
    req.preds = machine_.preds;
    ModificationResult m;
    try {
      m = modify(req, eps_);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("event at time " + format_rational(ev.time) + ": " + e.what());
    }
    ModificationRecord mr;
    for (const auto& [var, d] : m.deltas) {
      mr.old_values[var] = req.point.at(var);
      mr.new_values[var] = m.point.at(var);
    }
    mr.distance2 = m.distance2;
    out_[ev.time] = m.point;
    rec.modification = std::move(mr);
    ++report_.modified_count;
  }

  report_.events.push_back(std::move(rec));
  if (!step.output.top) pending_ = report_.events.size() - 1;
  state_ = step.state;
  return report_.events.back();
}

EnforcementResult EnforceSession::finish() {
  if (finished_) throw std::runtime_error("session already finished");
  finished_ = true;
  materialize_window(input_.duration(), true);
  report_.accepted = machine_.accepting.count(state_.location) > 0;

  EnforcementResult res;
  res.report = report_;
  if (report_.modified_count == 0) {
    res.output = input_;
    return res;
  }
  res.output.variables = input_.variables;
  for (const auto& [t, row] : out_) {
    std::vector<Rational> values;
    for (const auto& var : input_.variables) values.push_back(row.at(var));
    res.output.samples.emplace_back(t, std::move(values));
  }
  return res;
}

EnforcementResult enforce(const Signal& s, const StlFormula& phi, const Rational& eps) {
  TimedWord w = sign_encode(s, phi);
  EnforceSession session(s, phi, eps);
  for (const auto& ev : w.events) session.push(ev);
  return session.finish();
}

std::string report_to_json(const EnforcementReport& r) {
  using nlohmann::json;
  json j;
  j["accepted"] = r.accepted;
  j["modified_count"] = r.modified_count;
  j["events"] = json::array();
  for (const auto& ev : r.events) {
    json je;
    je["t"] = format_rational(ev.time);
    je["action"] = json::object();
    for (const auto& [id, b] : ev.action) je["action"][id] = b;
    je["from"] = ev.from;
    je["to"] = ev.to;
    je["clock"] = json::object();
    for (const auto& [c, v] : ev.clocks) je["clock"][c] = format_rational(v);
    je["output"] = json{{"top", ev.output.top},
                        {"fix", std::vector<std::string>(ev.output.fix.begin(),
                                                         ev.output.fix.end())}};
    if (ev.modification) {
      json jm;
      jm["vars"] = json::array();
      for (const auto& [var, v] : ev.modification->new_values) {
        jm["vars"].push_back(var);
        jm["old"][var] = format_rational(ev.modification->old_values.at(var));
        jm["new"][var] = format_rational(v);
      }
      jm["distance"] = ev.modification->distance();
      je["modification"] = std::move(jm);
    }
    j["events"].push_back(std::move(je));
  }
  return j.dump(2);
}

}  // namespace stlenf
