/*
 Copyright 2026 The conic-newton Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef CONIC_NEWTON_REPORT_HPP
#define CONIC_NEWTON_REPORT_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "conic_newton/common.hpp"
#include "conic_newton/linear_operator.hpp"
#include "json.hpp"

namespace conic::io {

inline constexpr int kReportSchemaVersion = 1;

/// JSON run report written by the command-line tools. Matrix solutions are
/// written to a separate file; vector solutions are embedded.
struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string solver;
  nlohmann::json config = nlohmann::json::object();
  Termination termination = Termination::MaxIter;
  long iterations = 0;
  std::vector<double> residuals;
  double wall_time_seconds = 0.0;
  std::optional<GuaranteeReport> guarantee;
  std::optional<std::vector<double>> solution;
  std::optional<std::vector<double>> projected_solution;
  std::optional<std::string> solution_file;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

namespace detail {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> opt_get(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const GuaranteeReport& g) {
  return {{"invertible", g.invertible},
          {"norm_T_inv", detail::opt_json(g.norm_T_inv)},
          {"norm_q_minus_id", detail::opt_json(g.norm_q_minus_id)},
          {"is_positive_definite", g.is_positive_definite},
          {"guarantee", to_string(g.guarantee)},
          {"predicted_ratio", detail::opt_json(g.predicted_ratio)}};
}

inline GuaranteeReport guarantee_from_json(const nlohmann::json& j) {
  GuaranteeReport g;
  g.invertible = j.at("invertible").get<bool>();
  g.norm_T_inv = detail::opt_get<double>(j, "norm_T_inv");
  g.norm_q_minus_id = detail::opt_get<double>(j, "norm_q_minus_id");
  g.is_positive_definite = j.at("is_positive_definite").get<bool>();
  g.guarantee = guarantee_from_string(j.at("guarantee").get<std::string>());
  g.predicted_ratio = detail::opt_get<double>(j, "predicted_ratio");
  return g;
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["schema_version"] = r.schema_version;
  j["solver"] = r.solver;
  j["config"] = r.config;
  j["termination"] = to_string(r.termination);
  j["iterations"] = r.iterations;
  j["residuals"] = r.residuals;
  j["wall_time_seconds"] = r.wall_time_seconds;
  j["guarantee"] = r.guarantee ? to_json(*r.guarantee) : nlohmann::json(nullptr);
  j["solution"] = detail::opt_json(r.solution);
  j["projected_solution"] = detail::opt_json(r.projected_solution);
  j["solution_file"] = detail::opt_json(r.solution_file);
  return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  try {
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw InvalidInput("unsupported report schema version " + std::to_string(r.schema_version));
    }
    r.solver = j.at("solver").get<std::string>();
    r.config = j.at("config");
    r.termination = termination_from_string(j.at("termination").get<std::string>());
    r.iterations = j.at("iterations").get<long>();
    r.residuals = j.at("residuals").get<std::vector<double>>();
    r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    if (j.contains("guarantee") && !j.at("guarantee").is_null()) r.guarantee = guarantee_from_json(j.at("guarantee"));
    r.solution = detail::opt_get<std::vector<double>>(j, "solution");
    r.projected_solution = detail::opt_get<std::vector<double>>(j, "projected_solution");
    r.solution_file = detail::opt_get<std::string>(j, "solution_file");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed run report: ") + e.what());
  }
  return r;
}

inline void write_report(const std::string& path, const RunReport& r) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write '" + path + "'");
  os << to_json(r).dump(2) << "\n";
}

inline RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  return report_from_json(j);
}

}  // namespace conic::io

#endif  // CONIC_NEWTON_REPORT_HPP
