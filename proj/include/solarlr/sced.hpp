// Operator's economic dispatch under true or falsified measurements.
//
// Balance uses the true demand; the falsified load only appears in the flow
// constants and the shedding bound, so the operator sees D + dD nodally.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "solarlr/attack.hpp"
#include "solarlr/case_model.hpp"
#include "solarlr/lp.hpp"
#include "solarlr/ptdf.hpp"

namespace solarlr {

struct ScedOptions {
  /// Uniform $/MWh for solar units. Unset: each unit keeps its case cost.
  std::optional<double> solar_cost;
};

struct ScedProgram {
  LinearProgram lp;
  std::vector<std::size_t> p_var;   // per conventional unit
  std::vector<std::size_t> r_var;   // per solar unit
  std::vector<std::size_t> j_var;   // per load
  std::vector<std::ptrdiff_t> f_var;  // per line, -1 for unlimited lines
  Eigen::VectorXd flow_constant;    // S*U_s*dR - S*V*(D + dD) per line
  std::optional<AttackVector> attack;
  std::uint64_t fingerprint = 0;
};

/// `attack` may be null. Dimension mismatches throw std::invalid_argument.
ScedProgram build_sced_lp(const NetworkCase& network, const ShiftFactorModel& model,
                          std::span<const double> solar_available, const AttackVector* attack,
                          const ScedOptions& options = {});

struct DispatchResult {
  std::vector<double> P;
  std::vector<double> R;
  std::vector<double> J;
  std::vector<double> F;  // every line, as the operator computes it
  double cost = 0.0;
  double shed_total = 0.0;
  std::optional<AttackVector> attack;
  std::uint64_t fingerprint = 0;
};

enum class ScedStatus { optimal, infeasible };

const char* to_string(ScedStatus status);

struct ScedOutcome {
  ScedStatus status = ScedStatus::infeasible;
  std::optional<DispatchResult> dispatch;
  std::size_t iterations = 0;
};

ScedOutcome solve_sced(const ScedProgram& program, const ShiftFactorModel& model,
                       const SimplexOptions& options = {});

/// Convenience: build and solve.
ScedOutcome run_sced(const NetworkCase& network, const ShiftFactorModel& model,
                     std::span<const double> solar_available, const AttackVector* attack,
                     const ScedOptions& options = {}, const SimplexOptions& simplex = {});

struct PhysicalFlowReport {
  std::vector<double> flow;
  std::vector<double> loading;        // |flow| / f_max, 0 on unlimited lines
  std::vector<std::size_t> overloaded;  // positions with loading > 1
};

/// Flows the dispatch actually produces with the true D and R0.
PhysicalFlowReport evaluate_true_flows(const DispatchResult& result, const ShiftFactorModel& model,
                                       std::span<const double> demand);

struct ImpactMetrics {
  double pre_cost = 0.0;
  double post_cost = 0.0;
  double cost_increase = 0.0;
  double shed_total = 0.0;
  double shed_increase = 0.0;
};

class FingerprintMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ImpactMetrics impact_metrics(const DispatchResult& pre, const DispatchResult& post);

}  // namespace solarlr
