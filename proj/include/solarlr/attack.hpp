// Load-redistribution attack with falsified solar output: target selection,
// the attack LP, and consistency checks on the resulting false data.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solarlr/case_model.hpp"
#include "solarlr/lp.hpp"
#include "solarlr/ptdf.hpp"

namespace solarlr {

struct SubsetStrategy {
  enum class Kind { top_k, all };
  Kind kind = Kind::top_k;
  std::size_t k = 1;

  /// Accepts "top1", "topk:<k>" and "all".
  static SubsetStrategy parse(std::string_view text);
  std::string to_string() const;
};

enum class ObjectiveForm {
  directional,  // sum of lambda_l * df_l
  verbatim,     // sum of df_l
};

struct AttackConfig {
  double tau = 0.5;    // load manipulation factor
  double alpha = 0.5;  // solar manipulation factor
  double xi = 0.9;     // line selection threshold
  double rho = 1.3;    // overload factor
  SubsetStrategy subset;
  ObjectiveForm objective = ObjectiveForm::directional;
  bool manipulate_load = true;   // false pins every dD at 0
  bool manipulate_solar = true;  // false drops the dR variables entirely

  void validate() const;
};

/// Vulnerable lines and the subset pushed past rho * f_max. Line entries are
/// positions into NetworkCase::branches, ascending.
struct TargetSets {
  std::vector<std::size_t> lines;
  std::vector<int> lambda;
  std::vector<double> loading;
  std::vector<std::size_t> overload_lines;
  /// Per entry of `lines`: whether a zero-sum manipulation can move the
  /// flow at all. Empty means every line counts as movable.
  std::vector<bool> movable;

  bool empty() const { return lines.empty(); }
  std::size_t position_of(std::size_t line) const;
};

/// Lines with |f0| / f_max >= xi, skipping unlimited branches. The sign
/// lambda is +1 for f0 >= 0 and -1 otherwise.
TargetSets select_target_lines(const NetworkCase& network, std::span<const double> base_flows, double xi);

/// Highest loading first, lower branch position on ties (loadings compared
/// on a 1e-9 grid). Only movable lines are eligible unless none is. Throws
/// std::invalid_argument when `targets` is empty.
std::vector<std::size_t> choose_overload_subset(const TargetSets& targets, const SubsetStrategy& strategy);

struct AttackInputs {
  std::vector<double> demand;           // D per load
  std::vector<double> solar_available;  // R0 per solar unit
  std::vector<double> base_flows;       // f0 per line
  std::vector<double> flow_limits;      // f_max per line
};

/// Fills targets.movable: a line is movable when its sensitivities to the
/// loads with D > 0 (or the units with R0 > 0) are not all equal, since the
/// zero-sum constraints cancel a constant row.
void mark_movable_lines(TargetSets& targets, const ShiftFactorModel& model, const AttackInputs& inputs,
                        const AttackConfig& config);

struct AttackProgram {
  LinearProgram lp;
  AttackInputs inputs;
  TargetSets targets;
  AttackConfig config;
  std::vector<std::ptrdiff_t> delta_d_var;  // per load, -1 when pinned at 0
  std::vector<std::ptrdiff_t> delta_r_var;  // per solar unit, -1 when pinned at 0
  std::vector<std::size_t> delta_f_var;     // per entry of targets.lines
};

/// Requires targets.overload_lines to be set (see choose_overload_subset).
AttackProgram build_attack_lp(const ShiftFactorModel& model, const AttackInputs& inputs, const TargetSets& targets,
                              const AttackConfig& config);

struct AttackVector {
  AttackConfig config;
  TargetSets targets;
  std::vector<double> delta_D;
  std::vector<double> delta_R;
  std::vector<double> delta_f;  // per entry of targets.lines
  double objective = 0.0;
  std::vector<double> base_demand;
  std::vector<double> base_R0;
  std::vector<double> base_flows;
  std::vector<double> flow_limits;

  /// All-zero vector with matching dimensions.
  static AttackVector zero(std::size_t loads, std::size_t solar_units, std::size_t lines);
};

enum class AttackStatus { feasible, infeasible, no_target };

const char* to_string(AttackStatus status);

/// Largest lambda_l * df_l reachable on one overload line within the
/// budgets, against what the overload constraint asks for.
struct BudgetShortfall {
  std::size_t line = 0;
  double required = 0.0;
  double achievable = 0.0;
};

struct AttackOutcome {
  AttackStatus status = AttackStatus::no_target;
  std::optional<AttackVector> vector;
  TargetSets targets;
  /// "load", "solar", "load+solar" or "none": the budgets that were active
  /// when the overload requirement could not be met.
  std::string binding_budget;
  std::vector<BudgetShortfall> shortfalls;
};

AttackOutcome solve_attack(const ShiftFactorModel& model, const AttackProgram& program,
                           const SimplexOptions& options = {});

/// Target selection, subset choice, LP build and solve in one call.
AttackOutcome plan_attack(const NetworkCase& network, const ShiftFactorModel& model, const AttackInputs& inputs,
                          const AttackConfig& config, const SimplexOptions& options = {});

struct ConsistencyReport {
  double tolerance = 1e-6;
  double load_sum_residual = 0.0;
  double solar_sum_residual = 0.0;
  double load_bound_excess = 0.0;   // max_i |dD_i| - tau*D_i
  double solar_bound_excess = 0.0;  // max_j |dR_j| - alpha*R0_j
  std::vector<double> flow_residual;    // per target line
  std::vector<double> overload_margin;  // per overload line: lambda*(f0 + df) - rho*f_max

  double max_flow_residual() const;
  bool physics_consistent() const;
  bool targets_met() const;
  bool passes() const { return physics_consistent(); }
};

ConsistencyReport verify_consistency(const AttackVector& vector, const ShiftFactorModel& model);

}  // namespace solarlr
