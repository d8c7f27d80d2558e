#include "stlenf/signal.hpp"

#include <fstream>
#include <sstream>

namespace stlenf {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

int Signal::var_index(const std::string& name) const {
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == name) return static_cast<int>(i);
  throw std::runtime_error("unknown signal variable '" + name + "'");
}

std::vector<Rational> Signal::value_at(const Rational& t) const {
  if (samples.empty()) throw std::runtime_error("empty signal");
  if (t < samples.front().first || t > samples.back().first)
    throw std::runtime_error("time " + format_rational(t) + " outside signal domain");
  // Binary search for the segment containing t.
  size_t lo = 0, hi = samples.size() - 1;
  while (lo + 1 < hi) {
    size_t mid = (lo + hi) / 2;
    if (samples[mid].first <= t) lo = mid;
    else hi = mid;
  }
  if (samples[lo].first == t) return samples[lo].second;
  if (samples[hi].first == t) return samples[hi].second;
  const auto& [t0, v0] = samples[lo];
  const auto& [t1, v1] = samples[hi];
  Rational w = (t - t0) / (t1 - t0);
  std::vector<Rational> out(v0.size());
  for (size_t i = 0; i < v0.size(); ++i) out[i] = v0[i] + w * (v1[i] - v0[i]);
  return out;
}

Rational Signal::value_at(const Rational& t, int var) const {
  return value_at(t).at(static_cast<size_t>(var));
}

std::map<std::string, Rational> Signal::point_at(const Rational& t) const {
  auto vals = value_at(t);
  std::map<std::string, Rational> out;
  for (size_t i = 0; i < variables.size(); ++i) out[variables[i]] = vals[i];
  return out;
}

Signal parse_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError(origin + ": empty file");
  line = strip_cr(line);
  auto header = split_row(line);
  if (header.empty() || header[0] != "time")
    throw CsvError(origin + ": header must start with 'time'");
  if (header.size() < 2) throw CsvError(origin + ": header lists no variables");

  Signal s;
  for (size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty()) throw CsvError(origin + ": empty variable name in header");
    s.variables.push_back(header[i]);
  }

  size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_row(line);
    if (fields.size() != header.size())
      throw CsvError(origin + ": row " + std::to_string(row_no) +
                     (fields.size() < header.size() ? ": missing column" : ": extra column"));
    Rational t;
    std::vector<Rational> vals;
    try {
      t = parse_rational(fields[0]);
      for (size_t i = 1; i < fields.size(); ++i) vals.push_back(parse_rational(fields[i]));
    } catch (const std::exception& e) {
      throw CsvError(origin + ": malformed row " + std::to_string(row_no) + ": " + e.what());
    }
    if (!s.samples.empty() && t <= s.samples.back().first)
      throw CsvError(origin + ": non-increasing time at row " + std::to_string(row_no));
    s.samples.emplace_back(std::move(t), std::move(vals));
  }
  if (s.samples.empty()) throw CsvError(origin + ": no samples");
  if (s.samples.front().first != 0)
    throw CsvError(origin + ": first sample must be at time 0");
  return s;
}

Signal load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path + ": cannot open file");
  return parse_csv(in, path);
}

void emit_csv(const Signal& s, std::ostream& out) {
  out << "time";
  for (const auto& v : s.variables) out << "," << v;
  out << "\n";
  for (const auto& [t, vals] : s.samples) {
    out << format_rational(t);
    for (const auto& v : vals) out << "," << format_rational(v);
    out << "\n";
  }
}

void save_csv(const Signal& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(path + ": cannot open file for writing");
  emit_csv(s, out);
  if (!out) throw CsvError(path + ": write failed");
}

}  // namespace stlenf
