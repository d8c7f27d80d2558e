#include "stlenf/encoder.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace stlenf {

namespace {

// Index of the largest profile time <= t.
size_t locate(const std::vector<Rational>& times, const Rational& t) {
  size_t lo = 0, hi = times.size() - 1;
  if (t < times.front() || t > times.back())
    throw std::runtime_error("time outside profile domain");
  while (lo + 1 < hi) {
    size_t mid = (lo + hi) / 2;
    if (times[mid] <= t) lo = mid;
    else hi = mid;
  }
  return times[hi] <= t ? hi : lo;
}

}  // namespace

int TruthProfile::sign_before(const Rational& t) const {
  size_t i = locate(times, t);
  if (times[i] == t) {
    if (i == 0) throw std::runtime_error("no interval before signal start");
    return interval_sign[i - 1];
  }
  return interval_sign[i];
}

int TruthProfile::sign_after(const Rational& t) const {
  size_t i = locate(times, t);
  if (times[i] == t && i + 1 == times.size())
    throw std::runtime_error("no interval after signal end");
  return interval_sign[i];
}

Rational TruthProfile::mu_at(const Rational& t) const {
  size_t i = locate(times, t);
  if (times[i] == t) return mu[i];
  // Interpolate inside the interval (exact).
  Rational w = (t - times[i]) / (times[i + 1] - times[i]);
  return mu[i] + w * (mu[i + 1] - mu[i]);
}

TruthProfile build_profile(const Signal& s, const AffineExpr& expr) {
  if (s.samples.empty()) throw std::runtime_error("empty signal");
  TruthProfile pr;

  // mu at the samples; interior roots become extra critical times.
  std::vector<Rational> mu_samples;
  mu_samples.reserve(s.samples.size());
  for (const auto& [t, vals] : s.samples) {
    std::map<std::string, Rational> point;
    for (size_t i = 0; i < s.variables.size(); ++i) point[s.variables[i]] = vals[i];
    mu_samples.push_back(expr.eval(point));
  }

  for (size_t i = 0; i + 1 < s.samples.size(); ++i) {
    const Rational& t0 = s.samples[i].first;
    const Rational& t1 = s.samples[i + 1].first;
    const Rational& m0 = mu_samples[i];
    const Rational& m1 = mu_samples[i + 1];
    pr.times.push_back(t0);
    pr.mu.push_back(m0);
    if (rat_sign(m0) * rat_sign(m1) < 0) {
      // Strict sign change: exactly one interior root.
      Rational root = t0 + (t1 - t0) * m0 / (m0 - m1);
      pr.times.push_back(root);
      pr.mu.push_back(Rational(0));
    }
  }
  pr.times.push_back(s.samples.back().first);
  pr.mu.push_back(mu_samples.back());

  pr.interval_sign.reserve(pr.times.size() - 1);
  for (size_t i = 0; i + 1 < pr.times.size(); ++i) {
    const Rational& a = pr.mu[i];
    const Rational& b = pr.mu[i + 1];
    int sa = rat_sign(a), sb = rat_sign(b);
    // mu is linear on the interval and any strict sign change was split at its
    // root, so the open-interval sign is determined by the endpoint values.
    int sign = (sa == 0 && sb == 0) ? 0 : (sa + sb > 0 ? 1 : -1);
    pr.interval_sign.push_back(sign);
  }
  return pr;
}

bool truth_of_sign(PredKind k, int sign) {
  switch (k) {
    case PredKind::GE: return sign >= 0;
    case PredKind::GT: return sign > 0;
    case PredKind::EQ: return sign == 0;
  }
  return false;
}

bool truth_of_value(PredKind k, const Rational& mu) {
  switch (k) {
    case PredKind::GE: return mu >= 0;
    case PredKind::GT: return mu > 0;
    case PredKind::EQ: return mu == 0;
  }
  return false;
}

namespace {

// Truth-change instants (used for GE and GT and to pick the crossing bit).
bool truth_changes(PredKind k, const TruthProfile& pr, size_t i) {
  return truth_of_sign(k, pr.interval_sign[i - 1]) != truth_of_sign(k, pr.interval_sign[i]);
}

std::vector<Rational> variable_points_impl(const TruthProfile& pr, PredKind kind) {
  std::vector<Rational> out;
  for (size_t i = 1; i + 1 < pr.times.size(); ++i) {
    switch (kind) {
      case PredKind::GE:
        if (truth_changes(PredKind::GE, pr, i)) out.push_back(pr.times[i]);
        break;
      case PredKind::GT:
        if (truth_changes(PredKind::GT, pr, i) ||
            (pr.mu[i] == 0 && pr.interval_sign[i - 1] > 0 && pr.interval_sign[i] > 0))
          out.push_back(pr.times[i]);
        break;
      case PredKind::EQ:
        if (pr.mu[i] == 0 && !(pr.interval_sign[i - 1] == 0 && pr.interval_sign[i] == 0))
          out.push_back(pr.times[i]);
        break;
    }
  }
  return out;
}

// The word bit for predicate p at event time t. At a zero of mu the bit takes
// the upcoming interval's truth when t is a truth-change instant (so that the
// step "speaks for" the interval it opens), and the at-instant truth
// otherwise; single-instant GT violations and EQ plateau exits read false.
bool event_bit(const Predicate& p, const TruthProfile& pr, const Rational& t,
               const std::set<Rational>& change_vps) {
  Rational m = pr.mu_at(t);
  if (m != 0) {
    if (p.kind == PredKind::EQ) return false;
    return m > 0;
  }
  bool interior_change = change_vps.count(t) > 0;
  switch (p.kind) {
    case PredKind::GE:
      if (interior_change && pr.has_after(t)) return truth_of_sign(PredKind::GE, pr.sign_after(t));
      return true;
    case PredKind::GT:
      if (interior_change && pr.has_after(t)) return truth_of_sign(PredKind::GT, pr.sign_after(t));
      return false;
    case PredKind::EQ: {
      bool leaves_plateau = pr.has_before(t) && pr.sign_before(t) == 0 && pr.has_after(t) &&
                            pr.sign_after(t) != 0;
      return !leaves_plateau;
    }
  }
  return false;
}

}  // namespace

std::vector<Rational> variable_points(const Signal& s, const Predicate& p) {
  TruthProfile pr = build_profile(s, p.expr);
  return variable_points_impl(pr, p.kind);
}

std::string event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::VariablePoint: return "variable";
    case EventKind::RelevantPoint: return "relevant";
    case EventKind::Both: return "both";
  }
  return "?";
}

TimedWord sign_encode(const Signal& s, const StlFormula& phi, const Rational& lead) {
  if (lead < 0) throw std::runtime_error("lead time must be nonnegative");
  std::vector<Rational> rps = relevant_points(phi);
  Rational dur = s.duration();
  if (!rps.empty() && rps.back() > dur)
    throw HorizonError("signal shorter than formula horizon: needs " +
                       format_rational(rps.back()) + ", have " + format_rational(dur));

  struct PredInfo {
    const Predicate* p;
    TruthProfile profile;
    std::set<Rational> change_vps;  // truth-change instants only
    std::set<Rational> all_vps;     // including GT touches / EQ boundaries
  };
  std::vector<PredInfo> infos;
  for (const Predicate& p : phi.preds) {
    PredInfo info;
    info.p = &p;
    info.profile = build_profile(s, p.expr);
    for (size_t i = 1; i + 1 < info.profile.times.size(); ++i)
      if (truth_changes(p.kind, info.profile, i)) info.change_vps.insert(info.profile.times[i]);
    for (const Rational& t : variable_points_impl(info.profile, p.kind)) info.all_vps.insert(t);
    infos.push_back(std::move(info));
  }

  // kind bitmask per event time: 1 = variable point, 2 = relevant point.
  std::map<Rational, int> events;
  events[Rational(0)] |= 2;
  for (const Rational& t : rps) events[t] |= 2;
  for (const auto& info : infos)
    for (const Rational& t : info.all_vps) events[t] |= 1;
  if (lead > 0) {
    std::vector<Rational> base;
    for (const auto& [t, k] : events) base.push_back(t);
    for (const Rational& t : base) {
      Rational shifted = t - lead;
      if (shifted < 0) shifted = 0;
      events[shifted] |= 1;
    }
  }

  TimedWord w;
  for (const auto& info : infos) w.predicate_ids.push_back(info.p->id);
  for (const auto& [t, mask] : events) {
    TimedEvent ev;
    ev.time = t;
    ev.kind = mask == 3 ? EventKind::Both
                        : (mask == 2 ? EventKind::RelevantPoint : EventKind::VariablePoint);
    for (const auto& info : infos)
      ev.action[info.p->id] = event_bit(*info.p, info.profile, t, info.change_vps);
    w.events.push_back(std::move(ev));
  }
  return w;
}

void emit_word_csv(const TimedWord& w, std::ostream& out) {
  out << "time,kind";
  for (const auto& id : w.predicate_ids) out << "," << id;
  out << "\n";
  for (const auto& ev : w.events) {
    out << format_rational(ev.time) << "," << event_kind_name(ev.kind);
    for (const auto& id : w.predicate_ids) out << "," << (ev.action.at(id) ? 1 : 0);
    out << "\n";
  }
}

}  // namespace stlenf
