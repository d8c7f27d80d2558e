#include "stlenf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stlenf/encoder.hpp"
#include "stlenf/enforcer.hpp"
#include "stlenf/errors.hpp"
#include "stlenf/monitor.hpp"
#include "stlenf/scenarios.hpp"
#include "stlenf/signal.hpp"
#include "stlenf/stl.hpp"
#include "stlenf/transducer.hpp"

namespace stlenf {

namespace {

// --property accepts either inline formula text or a file containing it.
// Formula text always contains structural characters a path never needs.
bool looks_like_formula(const std::string& s) {
  return s.find_first_of("()<>=! \t") != std::string::npos;
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

struct PropertyArg {
  std::string text;
  bool ok = false;
  int exit_code = 0;
};

PropertyArg read_property(const std::string& arg) {
  PropertyArg r;
  if (looks_like_formula(arg)) {
    r.text = arg;
    r.ok = true;
    return r;
  }
  std::ifstream f(arg);
  if (!f) {
    r.exit_code = usage_error("cannot open property file '" + arg + "'");
    return r;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  r.text = ss.str();
  // strip trailing whitespace/newlines
  while (!r.text.empty() && (r.text.back() == '\n' || r.text.back() == '\r' ||
                             r.text.back() == ' ' || r.text.back() == '\t'))
    r.text.pop_back();
  r.ok = true;
  return r;
}

bool file_exists(const std::string& path) {
  std::ifstream f(path);
  return f.good();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write file '" + path + "'");
  f << text;
  if (!text.empty() && text.back() != '\n') f << "\n";
}

std::string word_to_json(const TimedWord& w) {
  nlohmann::json j;
  j["predicates"] = w.predicate_ids;
  j["events"] = nlohmann::json::array();
  for (const auto& ev : w.events) {
    nlohmann::json je;
    je["time"] = format_rational(ev.time);
    je["kind"] = event_kind_name(ev.kind);
    je["action"] = nlohmann::json::object();
    for (const auto& [id, b] : ev.action) je["action"][id] = b;
    j["events"].push_back(std::move(je));
  }
  return j.dump(2);
}

int cmd_encode(const std::string& prop, const std::string& sig_path, const std::string& lead,
               const std::string& out, const std::string& format) {
  auto p = read_property(prop);
  if (!p.ok) return p.exit_code;
  if (!file_exists(sig_path)) return usage_error("cannot open signal file '" + sig_path + "'");
  StlFormula phi = parse_formula(p.text);
  Signal s = load_csv(sig_path);
  TimedWord w = sign_encode(s, phi, parse_rational(lead));
  if (format == "json") {
    write_text(out, word_to_json(w));
  } else {
    std::ostringstream ss;
    emit_word_csv(w, ss);
    write_text(out, ss.str());
  }
  return 0;
}

int cmd_build(const std::string& prop, const std::string& out) {
  auto p = read_property(prop);
  if (!p.ok) return p.exit_code;
  StlFormula phi = parse_formula(p.text);
  write_text(out, to_json(compile(phi)));
  return 0;
}

int cmd_monitor(const std::string& prop, const std::string& sig_path, const std::string& out) {
  auto p = read_property(prop);
  if (!p.ok) return p.exit_code;
  if (!file_exists(sig_path)) return usage_error("cannot open signal file '" + sig_path + "'");
  StlFormula phi = parse_formula(p.text);
  Signal s = load_csv(sig_path);
  Verdict v = satisfies(s, phi);
  nlohmann::json j;
  j["satisfied"] = v.satisfied;
  if (v.witness) j["witness"] = format_rational(*v.witness);
  write_text(out, j.dump(2));
  return v.satisfied ? 0 : 1;
}

void write_plot_csv(const std::string& path, const Signal& in, const Signal& out) {
  std::ostringstream ss;
  ss << "time";
  for (const auto& var : in.variables) ss << "," << var << "_in," << var << "_out";
  ss << "\n";
  std::set<Rational> times;
  for (const auto& [t, row] : in.samples) times.insert(t);
  for (const auto& [t, row] : out.samples) times.insert(t);
  for (const Rational& t : times) {
    ss << format_rational(t);
    for (const auto& var : in.variables)
      ss << "," << format_rational(in.value_at(t, in.var_index(var))) << ","
         << format_rational(out.value_at(t, out.var_index(var)));
    ss << "\n";
  }
  write_text(path, ss.str());
}

int cmd_enforce(const std::string& prop, const std::string& sig_path, const std::string& out,
                const std::string& report_path, const std::string& plot_path,
                const std::string& eps) {
  auto p = read_property(prop);
  if (!p.ok) return p.exit_code;
  if (!file_exists(sig_path)) return usage_error("cannot open signal file '" + sig_path + "'");
  StlFormula phi = parse_formula(p.text);
  Signal s = load_csv(sig_path);
  EnforcementResult res = enforce(s, phi, parse_rational(eps));
  std::ostringstream ss;
  emit_csv(res.output, ss);
  write_text(out, ss.str());
  std::string rp = report_path.empty() ? out + ".report.json" : report_path;
  write_text(rp, report_to_json(res.report));
  if (!plot_path.empty()) write_plot_csv(plot_path, s, res.output);
  std::cerr << "enforced " << res.report.modified_count << " of " << res.report.events.size()
            << " events\n";
  return 0;
}

int cmd_bench(const std::string& scenario, const std::string& counts_arg, int reps,
              uint64_t seed, const std::string& eps, const std::string& out) {
  const Scenario& sc = scenario_by_name(scenario);
  StlFormula phi = parse_formula(sc.property);
  Rational eps_r = parse_rational(eps);
  std::vector<int> counts;
  std::stringstream cs(counts_arg);
  std::string tok;
  while (std::getline(cs, tok, ','))
    if (!tok.empty()) counts.push_back(std::stoi(tok));
  if (counts.empty()) return usage_error("no violation counts given");

  std::ostringstream ss;
  ss << "v,len,time_ms\n";
  for (int v : counts) {
    Signal s = v == 0 ? scenario_satisfying(scenario, seed)
                      : scenario_violating(scenario, v, seed + uint64_t(v));
    size_t len = sign_encode(s, phi).length();
    std::vector<double> times;
    for (int r = 0; r < std::max(1, reps); ++r) {
      auto t0 = std::chrono::steady_clock::now();
      EnforcementResult res = enforce(s, phi, eps_r);
      auto t1 = std::chrono::steady_clock::now();
      (void)res;
      times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    double median = times[times.size() / 2];
    ss << v << "," << len << "," << median << "\n";
  }
  write_text(out, ss.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Runtime enforcement of non-nested STL properties over piecewise-linear signals"};
  app.require_subcommand(1);

  std::string prop, sig, out, format = "csv", eps = "1/1000000", lead = "0";
  std::string report_path, plot_path, scenario = "stopping";
  std::string counts = "2,4,6,8,10,12,14,16,18,20";
  int reps = 3;
  uint64_t seed = 42;

  auto* enc = app.add_subcommand("encode", "Encode a signal into a timed word");
  enc->add_option("--property", prop, "formula text or file")->required();
  enc->add_option("--signal", sig, "signal CSV file")->required();
  enc->add_option("--lead", lead, "lead time before each variable point");
  enc->add_option("--out", out, "output path (default: stdout)");
  enc->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* bld = app.add_subcommand("build", "Compile a formula into a timed transducer (JSON)");
  bld->add_option("--property", prop, "formula text or file")->required();
  bld->add_option("--out", out, "output path (default: stdout)");

  auto* mon = app.add_subcommand("monitor", "Check a signal against a property");
  mon->add_option("--property", prop, "formula text or file")->required();
  mon->add_option("--signal", sig, "signal CSV file")->required();
  mon->add_option("--out", out, "output path (default: stdout)");

  auto* enf = app.add_subcommand("enforce", "Minimally modify a signal to satisfy a property");
  enf->add_option("--property", prop, "formula text or file")->required();
  enf->add_option("--signal", sig, "signal CSV file")->required();
  enf->add_option("--out", out, "enforced signal CSV path")->required();
  enf->add_option("--report", report_path, "report JSON path (default: <out>.report.json)");
  enf->add_option("--plot", plot_path, "paired input/output plot-data CSV path");
  enf->add_option("--eps", eps, "margin for strict inequalities");

  auto* ben = app.add_subcommand("bench", "Scaling benchmark over synthetic scenario signals");
  ben->add_option("--scenario", scenario, "stopping, charging or deceleration");
  ben->add_option("--counts", counts, "comma-separated violation counts");
  ben->add_option("--reps", reps, "repetitions per count (median reported)");
  ben->add_option("--seed", seed, "generator seed");
  ben->add_option("--eps", eps, "margin for strict inequalities");
  ben->add_option("--out", out, "output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*enc) return cmd_encode(prop, sig, lead, out, format);
    if (*bld) return cmd_build(prop, out);
    if (*mon) return cmd_monitor(prop, sig, out);
    if (*enf) return cmd_enforce(prop, sig, out, report_path, plot_path, eps);
    if (*ben) return cmd_bench(scenario, counts, reps, seed, eps, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return usage_error("no subcommand given");
}

}  // namespace stlenf
