#pragma once

// Experiment reports: ordered rows, pass/fail checks, free-form notes.
// JSON output prints every floating value with 17 significant digits so the
// text is a lossless, deterministic function of the computed doubles.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

namespace freeinv {

using ojson = nlohmann::ordered_json;

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ojson> rows;  // each row is a flat object
  std::vector<Check> checks;
  std::vector<std::string> notes;

  void check(std::string name, bool pass, std::string detail = {}) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_json(std::string& out, const ojson& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case ojson::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, x] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ojson(k).dump() + ": ";
        write_json(out, x, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case ojson::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_json(out, v[i], indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case ojson::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

inline std::string csv_cell(const ojson& v) {
  switch (v.type()) {
    case ojson::value_t::null:
      return "";
    case ojson::value_t::number_float:
      return std::isfinite(v.get<double>()) ? format_double(v.get<double>()) : "";
    case ojson::value_t::string: {
      const auto s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    case ojson::value_t::array: {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
      return s;
    }
    default:
      return v.dump();
  }
}

}  // namespace detail

inline ojson report_to_ojson(const ExperimentReport& r) {
  ojson j;
  j["experiment"] = r.experiment;
  j["rows"] = ojson::array();
  for (const auto& row : r.rows) j["rows"].push_back(row);
  j["checks"] = ojson::array();
  for (const auto& c : r.checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["notes"] = r.notes;
  j["all_pass"] = r.all_pass();
  return j;
}

inline std::string to_json_text(const ojson& j) {
  std::string out;
  detail::write_json(out, j, 0);
  out += "\n";
  return out;
}

inline std::string to_json_text(const ExperimentReport& r) { return to_json_text(report_to_ojson(r)); }

/// Row table with a header built from the union of row keys in first-seen
/// order; checks and notes follow as '#' comment lines.
inline std::string to_csv_text(const ExperimentReport& r) {
  std::vector<std::string> cols;
  for (const auto& row : r.rows)
    for (const auto& [k, v] : row.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  std::string out;
  for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + cols[c];
  if (!cols.empty()) out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ",";
      if (row.contains(cols[c])) out += detail::csv_cell(row.at(cols[c]));
    }
    out += "\n";
  }
  for (const auto& c : r.checks)
    out += "# check," + c.name + "," + (c.pass ? "PASS" : "FAIL") + "," + detail::csv_cell(ojson(c.detail)) + "\n";
  for (const auto& n : r.notes) out += "# note," + detail::csv_cell(ojson(n)) + "\n";
  return out;
}

}  // namespace freeinv
