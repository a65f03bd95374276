#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cramersim/mc.hpp"

namespace cramersim {

// Outcome of one simulation-vs-prediction comparison. The JSON layout is the
// wire contract: {experiment, params, master_seed, replicas, estimate,
// ci_low, ci_high, predicted, rule, verdict, elapsed_ms}.
struct ComparisonReport {
  std::string experiment;
  std::vector<std::pair<std::string, double>> params;
  std::uint64_t master_seed = 0;
  std::int64_t replicas = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double predicted = 0.0;
  std::string rule;
  bool pass = false;
  std::string note;
  std::int64_t elapsed_ms = 0;
};

// Shortest round-trip decimal for doubles (CSV contract).
inline std::string shortest_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json to_json(const ComparisonReport& r, bool include_elapsed = true) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["master_seed"] = r.master_seed;
  j["replicas"] = r.replicas;
  j["estimate"] = r.estimate;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["predicted"] = r.predicted;
  j["rule"] = r.rule;
  j["verdict"] = r.pass ? "pass" : "fail";
  if (!r.note.empty()) j["note"] = r.note;
  if (include_elapsed) j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

inline nlohmann::ordered_json to_json(const McReport& r, bool include_elapsed = true) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["master_seed"] = r.master_seed;
  j["replicas"] = r.replicas;
  j["estimate"] = r.estimate;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  if (include_elapsed) j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

// Minimal CSV table: header row, one row per grid point.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != header_.size())
      throw std::invalid_argument("CsvTable: row width does not match header");
    rows_.push_back(row);
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (i) out += ',';
      out += header_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += shortest_double(row[i]);
      }
      out += '\n';
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("CsvTable: cannot open " + path);
    f << str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

inline void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_json_file: cannot open " + path);
  f << j.dump(2) << '\n';
}

}  // namespace cramersim
