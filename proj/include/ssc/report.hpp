#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "ssc/types.hpp"

namespace ssc {

struct Timings {
  double solve_s = 0.0;
  double spectral_s = 0.0;
  double total_s = 0.0;

  bool operator==(const Timings&) const = default;
};

struct MetricSet {
  std::optional<double> objective;
  std::optional<double> subspace_preserving_error;
  std::optional<double> clustering_error;
  std::optional<std::int64_t> zero_columns;

  bool operator==(const MetricSet&) const = default;
};

/// Everything needed to reproduce and judge one run: solver identity, the
/// full configuration echo, the seed, metrics, iteration traces, and wall
/// times. Serialized as schema-versioned JSON; unknown fields in a file are
/// ignored on read.
struct ExperimentReport {
  int schema_version = 1;
  std::string solver;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  MetricSet metrics;
  SolveTrace trace;
  Timings timings;

  bool operator==(const ExperimentReport& other) const {
    return schema_version == other.schema_version && solver == other.solver &&
           config == other.config && seed == other.seed && metrics == other.metrics &&
           trace.objective == other.trace.objective &&
           trace.change_norm == other.trace.change_norm &&
           trace.aux_residual == other.trace.aux_residual &&
           trace.iterations_run == other.trace.iterations_run &&
           trace.wall_time_s == other.trace.wall_time_s && timings == other.timings;
  }
};

namespace detail {

template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

template <typename T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  j["solver"] = report.solver;
  j["config"] = report.config;
  j["seed"] = report.seed;

  nlohmann::json metrics;
  detail::put_optional(metrics, "objective", report.metrics.objective);
  detail::put_optional(metrics, "subspace_preserving_error",
                       report.metrics.subspace_preserving_error);
  detail::put_optional(metrics, "clustering_error", report.metrics.clustering_error);
  detail::put_optional(metrics, "zero_columns", report.metrics.zero_columns);
  j["metrics"] = metrics;

  nlohmann::json trace;
  trace["objective"] = report.trace.objective;
  trace["change_norm"] = report.trace.change_norm;
  trace["aux_residual"] = report.trace.aux_residual;
  trace["iterations_run"] = report.trace.iterations_run;
  trace["wall_time_s"] = report.trace.wall_time_s;
  j["trace"] = trace;

  j["timings"] = {{"solve_s", report.timings.solve_s},
                  {"spectral_s", report.timings.spectral_s},
                  {"total_s", report.timings.total_s}};
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  report.schema_version = j.value("schema_version", 1);
  report.solver = j.value("solver", std::string{});
  if (j.contains("config")) report.config = j.at("config").get<std::map<std::string, std::string>>();
  report.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    report.metrics.objective = detail::get_optional<double>(m, "objective");
    report.metrics.subspace_preserving_error =
        detail::get_optional<double>(m, "subspace_preserving_error");
    report.metrics.clustering_error = detail::get_optional<double>(m, "clustering_error");
    report.metrics.zero_columns = detail::get_optional<std::int64_t>(m, "zero_columns");
  }
  if (j.contains("trace")) {
    const auto& t = j.at("trace");
    report.trace.objective = t.value("objective", std::vector<double>{});
    report.trace.change_norm = t.value("change_norm", std::vector<double>{});
    report.trace.aux_residual = t.value("aux_residual", std::vector<double>{});
    report.trace.iterations_run = t.value("iterations_run", 0);
    report.trace.wall_time_s = t.value("wall_time_s", 0.0);
  }
  if (j.contains("timings")) {
    const auto& t = j.at("timings");
    report.timings.solve_s = t.value("solve_s", 0.0);
    report.timings.spectral_s = t.value("spectral_s", 0.0);
    report.timings.total_s = t.value("total_s", 0.0);
  }
  return report;
}

inline void save_report(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(report).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline ExperimentReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": bad report JSON: " + e.what());
  }
  return report_from_json(j);
}

}  // namespace ssc
