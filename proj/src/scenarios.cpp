#include "stlenf/scenarios.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

namespace stlenf {

namespace {

using R = Rational;

struct Polyline {
  std::vector<std::pair<R, R>> pts;  // (time, value), strictly increasing times

  // The two-argument mpq constructor does not reduce to lowest terms, and GMP's
  // exact equality (and hence guard checks downstream) assumes reduced operands,
  // so every sample is canonicalized on entry.
  void add(R t, R v) {
    t.canonicalize();
    v.canonicalize();
    pts.emplace_back(std::move(t), std::move(v));
  }

  void sort() {
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < pts.size(); ++i)
      if (pts[i].first == pts[i - 1].first)
        throw std::runtime_error("scenario generator produced duplicate sample time " +
                                 format_rational(pts[i].first));
  }

  R at(const R& t) const {
    if (t <= pts.front().first) return pts.front().second;
    for (size_t i = 1; i < pts.size(); ++i) {
      if (t <= pts[i].first) {
        const auto& [t0, v0] = pts[i - 1];
        const auto& [t1, v1] = pts[i];
        if (t == t1) return v1;
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
      }
    }
    return pts.back().second;
  }
};

Signal merge(const std::vector<std::string>& vars, const std::vector<Polyline>& lines) {
  std::set<R> times;
  for (const auto& l : lines)
    for (const auto& [t, v] : l.pts) times.insert(t);
  Signal s;
  s.variables = vars;
  for (const R& t : times) {
    std::vector<R> row;
    for (const auto& l : lines) row.push_back(l.at(t));
    s.samples.emplace_back(t, std::move(row));
  }
  return s;
}

// Speed trace: 20 → 18 over [0, 9/2], then a descent to a full stop that
// holds to the end. Spikes above 30 go into [range_lo, range_hi] slots (two
// threshold crossings each); a tail violation keeps the speed positive.
Polyline stopping_line(std::mt19937_64& rng, int spikes, bool tail_violation, bool wiggles,
                       const R& range_lo, const R& range_hi) {
  Polyline p;
  p.add(0, 20);
  // The explicit R(...) forces evaluation: gmpxx expression templates must not
  // outlive the temporaries they reference.
  auto base = [](const R& t) { return R(R(20) - R(4, 9) * t); };
  if (spikes > 0) {
    R w = (range_hi - range_lo) / spikes;
    for (int i = 0; i < spikes; ++i) {
      R slot = range_lo + w * i;
      R a = slot + w / 8 * (1 + int(rng() % 2));
      R b = slot + w - w / 8 * (1 + int(rng() % 2));
      R mid = (a + b) / 2;
      R amp = R(256 + int(rng() % 65), 8);  // 32 .. 40
      p.add(a, base(a));
      p.add(mid, amp);
      p.add(b, base(b));
    }
  }
  if (wiggles) {
    int k = int(rng() % 3);
    static const int slots[] = {5, 7, 9, 11, 13};  // quarters: 5/4 .. 13/4
    int start = k < 5 ? int(rng() % (5 - k)) : 0;
    for (int i = 0; i < k; ++i)
      p.add(R(slots[start + i], 4), R(96 + int(rng() % 129), 8));  // 12 .. 28
  }
  p.add(R(9, 2), 18);
  if (tail_violation) {
    p.add(R(15, 2), 2);
    p.add(10, R(1 + int(rng() % 8), 8));  // ends positive: never stops
  } else {
    R onset = R(11 + 2 * int(rng() % 4), 2);  // stop at 11/2 .. 17/2
    p.add(onset, 0);
    p.add(10, 0);
  }
  p.sort();
  return p;
}

// Charging-current trace: 8 throughout, with spikes above the 10 limit in
// [range_lo, range_hi]; `half_spike` appends an up-crossing that stays high
// through the end (one crossing instead of two).
Polyline current_line(std::mt19937_64& rng, int spikes, bool half_spike, const R& range_lo,
                      const R& range_hi) {
  Polyline p;
  p.add(0, 8);
  if (spikes > 0) {
    R w = (range_hi - range_lo) / spikes;
    for (int i = 0; i < spikes; ++i) {
      R slot = range_lo + w * i;
      R a = slot + w / 8 * (1 + int(rng() % 2));
      R b = slot + w - w / 8 * (1 + int(rng() % 2));
      R mid = (a + b) / 2;
      R amp = R(84 + int(rng() % 29), 8);  // 10.5 .. 14
      p.add(a, 8);
      p.add(mid, amp);
      p.add(b, 8);
    }
  }
  if (half_spike) {
    p.add(R(37, 4), 8);
    p.add(10, R(84 + int(rng() % 29), 8));
  } else {
    p.add(10, 8);
  }
  p.sort();
  return p;
}

// Charging-voltage trace: constant 4, optionally touching the 4.2 setpoint
// exactly once (an isolated equality instant that releases the obligation).
Polyline voltage_line(const std::optional<R>& touch) {
  Polyline p;
  p.add(0, 4);
  if (touch) {
    p.add(*touch - R(1, 4), 4);
    p.add(*touch, R(21, 5));
    // A touch close to the end falls back to the final sample for the
    // descending flank (the setpoint instant stays isolated either way).
    if (*touch + R(1, 4) < 10) p.add(*touch + R(1, 4), 4);
  }
  p.add(10, 4);
  p.sort();
  return p;
}

Signal single(const std::string& var, const Polyline& line) {
  return merge({var}, {line});
}

}  // namespace

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> scenarios = {
      {"stopping", "(v <= 30) U[5,10] (v == 0)", {"v"}},
      {"charging", "(V == 4.2) R[2,10] (I < 10)", {"V", "I"}},
      {"deceleration", "(w <= 30) U[5,10] (w == 0) and (m <= 30) U[5,10] (m == 0)", {"w", "m"}},
  };
  return scenarios;
}

const Scenario& scenario_by_name(const std::string& name) {
  for (const auto& s : all_scenarios())
    if (s.name == name) return s;
  throw std::runtime_error("unknown scenario '" + name + "'");
}

Signal scenario_satisfying(const std::string& name, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Scenario& sc = scenario_by_name(name);
  if (sc.name == "stopping")
    return single("v", stopping_line(rng, 0, false, true, R(3, 4), R(17, 4)));
  if (sc.name == "charging") {
    if (seed % 4 == 0) {
      // Released run: the voltage touches the setpoint at t=6, after which a
      // current spike is allowed.
      Polyline v = voltage_line(R(6));
      Polyline i = current_line(rng, 1, false, R(27, 4), R(35, 4));
      return merge({"V", "I"}, {v, i});
    }
    Polyline v = voltage_line(std::nullopt);
    Polyline i;
    i.add(0, 8);
    int k = int(rng() % 3);
    static const int slots[] = {3, 4, 5, 6, 7};
    int start = k < 5 ? int(rng() % (5 - k)) : 0;
    for (int j = 0; j < k; ++j) i.add(slots[start + j], R(64 - int(rng() % 12), 8));  // 6.5 .. 8
    i.add(10, 8);
    i.sort();
    // benign voltage variation below the setpoint
    if (seed % 2 == 1) {
      v.pts.clear();
      v.add(0, 4);
      v.add(R(9, 2), R(38 + int(rng() % 4), 10));  // 3.8 .. 4.1
      v.add(10, 4);
    }
    return merge({"V", "I"}, {v, i});
  }
  // deceleration
  Polyline w = stopping_line(rng, 0, false, true, R(3, 4), R(5, 2));
  Polyline m = stopping_line(rng, 0, false, true, R(11, 4), R(17, 4));
  return merge({"w", "m"}, {w, m});
}

Signal scenario_violating(const std::string& name, int violations, uint64_t seed) {
  if (violations <= 0) throw std::runtime_error("violation count must be positive");
  std::mt19937_64 rng(seed);
  const Scenario& sc = scenario_by_name(name);
  if (sc.name == "stopping") {
    bool tail = violations % 2 == 1;
    int spikes = tail ? (violations - 1) / 2 : violations / 2;
    return single("v", stopping_line(rng, spikes, tail, false, R(3, 4), R(17, 4)));
  }
  if (sc.name == "charging") {
    bool half = violations % 2 == 1;
    int spikes = violations / 2;
    bool released_late = !half && seed % 3 == 0;
    Polyline i = current_line(rng, spikes, half, R(5, 2), released_late ? R(9) : R(19, 2));
    Polyline v = voltage_line(released_late ? std::optional<R>(R(39, 4)) : std::nullopt);
    return merge({"V", "I"}, {v, i});
  }
  // deceleration: split the spikes across the two axles; an odd count adds a
  // missing-stop tail on m.
  bool tail = violations % 2 == 1;
  int spikes = (tail ? violations - 1 : violations) / 2;
  int spikes_w = (spikes + 1) / 2;
  int spikes_m = spikes / 2;
  Polyline w = stopping_line(rng, spikes_w, false, false, R(3, 4), R(5, 2));
  Polyline m = stopping_line(rng, spikes_m, tail, false, R(11, 4), R(17, 4));
  return merge({"w", "m"}, {w, m});
}

}  // namespace stlenf
