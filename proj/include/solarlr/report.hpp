// CSV and JSON reports for scenario runs, plus the artifact audit that
// re-derives a metrics row from the serialized dispatches.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "solarlr/harness.hpp"

namespace solarlr {

/// scenario, pre_cost, post_cost, increase, shed_mw, attack_objective, feasible
struct MetricsRow {
  std::string scenario;
  std::optional<double> pre_cost;
  std::optional<double> post_cost;
  std::optional<double> increase;
  std::optional<double> shed_mw;
  std::optional<double> attack_objective;
  bool feasible = false;
};

inline constexpr const char* kMetricsHeader = "scenario,pre_cost,post_cost,increase,shed_mw,attack_objective,feasible";

MetricsRow metrics_row(const ScenarioResult& result);
std::string format_row(const MetricsRow& row);

std::string matrix_csv(const std::vector<ScenarioResult>& results);
nlohmann::json matrix_json(const std::vector<ScenarioResult>& results);

/// Full per-scenario record: R0, status, attack vector and both dispatches.
nlohmann::json scenario_artifact(const ScenarioResult& result, const Pipeline& pipeline);

/// Rebuilds the row from an artifact alone (dispatch costs, shedding and the
/// attack objective), checking dispatch fingerprints on the way.
MetricsRow row_from_artifact(const nlohmann::json& artifact, const Pipeline& pipeline);

/// x,scenario,y files for fleet R0, post-attack cost, cost increase and
/// shedding. Returns the paths written.
std::vector<std::string> write_plot_series(const std::string& dir, const std::vector<ScenarioResult>& results);

std::string sweep_csv(const SweepResult& sweep);
std::string coordination_csv(const CoordinationResult& study);

/// Creates parent directories as needed.
void write_file(const std::string& path, const std::string& content);

/// Scenario label reduced to a file-name-safe stem.
std::string file_stem(const std::string& label);

}  // namespace solarlr
