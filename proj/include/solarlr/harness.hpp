// End-to-end runs: pre-attack dispatch, attack, post-attack dispatch, over
// one scenario, the full scenario matrix, an alpha sweep, or the
// coordinated-vs-solar-only comparison.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solarlr/attack.hpp"
#include "solarlr/case_model.hpp"
#include "solarlr/ptdf.hpp"
#include "solarlr/sced.hpp"
#include "solarlr/solar.hpp"

namespace solarlr {

struct RunConfig {
  std::string case_path;
  std::string solar_ids_path;
  std::string irradiance_path;  // may be empty for commands that take no scenario
  AttackConfig attack;
  std::optional<int> slack;
  std::string out_dir = "out";
  std::string format = "csv";  // csv or json
  CaseOptions case_options;
  ScedOptions sced;
  SolarParams solar;  // shared I_s, S_c, kappa; s_r comes from each unit
  SimplexOptions simplex;
  unsigned jobs = 1;
};

/// Parsed inputs shared by every scenario of a run. Immutable once built.
struct Pipeline {
  RunConfig config;
  NetworkCase network;
  ShiftFactorModel model;
  SolarFleet fleet;
  std::optional<ScenarioMatrix> scenarios;

  const ScenarioMatrix& matrix() const;
};

Pipeline load_pipeline(const RunConfig& config);

enum class ScenarioStatus { ok, no_target, attack_infeasible, pre_infeasible, post_infeasible };

const char* to_string(ScenarioStatus status);

/// When the attack is infeasible or finds no target the attacker injects
/// nothing: `post` is the pre-attack dispatch and the increase is 0.
struct ScenarioResult {
  std::string label;
  std::vector<double> R0;
  double r0_total = 0.0;
  AttackConfig config;
  ScenarioStatus status = ScenarioStatus::ok;
  std::optional<DispatchResult> pre;
  AttackOutcome attack;
  std::optional<DispatchResult> post;
  std::optional<ImpactMetrics> metrics;
  double seconds = 0.0;

  bool attack_feasible() const { return attack.status == AttackStatus::feasible; }
};

ScenarioResult run_scenario(const Pipeline& pipeline, std::string label, std::vector<double> R0,
                            const AttackConfig& config);

ScenarioResult run_profile(const Pipeline& pipeline, const IrradianceProfile& profile, const AttackConfig& config);

/// One result per profile, in matrix order whatever `jobs` is.
std::vector<ScenarioResult> run_matrix(const Pipeline& pipeline, const AttackConfig& config, unsigned jobs = 1);

/// First profile with the largest fleet output.
const IrradianceProfile& peak_profile(const Pipeline& pipeline);

struct SweepResult {
  std::vector<double> alphas;  // ascending
  std::vector<ScenarioResult> rows;
  bool non_decreasing = false;      // post cost and shedding
  bool strictly_increasing = false; // cost increase
  bool above_baseline = false;      // every post cost >= pre cost
};

SweepResult alpha_sweep(const Pipeline& pipeline, const AttackConfig& base, std::vector<double> alphas,
                        const IrradianceProfile& profile);

struct CoordinationResult {
  ScenarioResult solar_only;
  ScenarioResult coordinated;

  /// Coordinated cost increase minus the solar-only one; nullopt when either
  /// post-attack dispatch is missing.
  std::optional<double> advantage() const;
};

CoordinationResult coordination_study(const Pipeline& pipeline, const AttackConfig& base,
                                      const IrradianceProfile& profile);

}  // namespace solarlr
