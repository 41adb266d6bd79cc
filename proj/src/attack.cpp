#include "solarlr/attack.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace solarlr {

namespace {

constexpr double kBoundSlack = 1e-9;
constexpr double kLoadingGrid = 1e-9;

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw std::invalid_argument(fmt::format("{} has {} entries, expected {}", what, got, want));
}

}  // namespace

SubsetStrategy SubsetStrategy::parse(std::string_view text) {
  SubsetStrategy s;
  if (text == "top1") return s;
  if (text == "all") {
    s.kind = Kind::all;
    return s;
  }
  constexpr std::string_view prefix = "topk:";
  if (text.substr(0, prefix.size()) == prefix) {
    auto digits = text.substr(prefix.size());
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && k > 0) {
      s.k = k;
      return s;
    }
  }
  throw std::invalid_argument(fmt::format("subset strategy '{}' is not one of top1, topk:<k>, all", text));
}

std::string SubsetStrategy::to_string() const {
  if (kind == Kind::all) return "all";
  return k == 1 ? "top1" : fmt::format("topk:{}", k);
}

void AttackConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument(fmt::format("tau = {} outside [0, 1]", tau));
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument(fmt::format("alpha = {} outside [0, 1]", alpha));
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument(fmt::format("xi = {} outside (0, 1]", xi));
  if (!(rho > 1.0)) throw std::invalid_argument(fmt::format("rho = {} must exceed 1", rho));
  if (subset.kind == SubsetStrategy::Kind::top_k && subset.k == 0) throw std::invalid_argument("top-k needs k >= 1");
}

std::size_t TargetSets::position_of(std::size_t line) const {
  auto it = std::find(lines.begin(), lines.end(), line);
  if (it == lines.end()) throw std::out_of_range(fmt::format("line position {} is not a target", line));
  return static_cast<std::size_t>(it - lines.begin());
}

TargetSets select_target_lines(const NetworkCase& network, std::span<const double> base_flows, double xi) {
  require_size(base_flows.size(), network.branches.size(), "base flows");
  TargetSets t;
  for (std::size_t l = 0; l < network.branches.size(); ++l) {
    const auto& br = network.branches[l];
    if (br.unlimited()) continue;
    const double f0 = base_flows[l];
    const int lambda = f0 >= 0.0 ? 1 : -1;
    const double ratio = f0 / (lambda * br.flow_limit);
    if (ratio >= xi - kLoadingGrid) {
      t.lines.push_back(l);
      t.lambda.push_back(lambda);
      t.loading.push_back(ratio);
    }
  }
  return t;
}

std::vector<std::size_t> choose_overload_subset(const TargetSets& targets, const SubsetStrategy& strategy) {
  if (targets.empty()) throw std::invalid_argument("no vulnerable lines to choose from");
  std::vector<std::size_t> order;
  const bool any_movable = std::find(targets.movable.begin(), targets.movable.end(), true) != targets.movable.end();
  for (std::size_t k = 0; k < targets.lines.size(); ++k) {
    if (!any_movable || targets.movable[k]) order.push_back(k);
  }
  auto key = [&](std::size_t k) { return std::llround(targets.loading[k] / kLoadingGrid); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (key(a) != key(b)) return key(a) > key(b);
    return targets.lines[a] < targets.lines[b];
  });
  std::size_t take = strategy.kind == SubsetStrategy::Kind::all ? order.size() : std::min(strategy.k, order.size());
  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < take; ++i) subset.push_back(targets.lines[order[i]]);
  std::sort(subset.begin(), subset.end());
  return subset;
}

void mark_movable_lines(TargetSets& targets, const ShiftFactorModel& model, const AttackInputs& inputs,
                        const AttackConfig& config) {
  auto spread = [](const Eigen::MatrixXd& sens, Eigen::Index row, const std::vector<double>& avail, bool enabled) {
    if (!enabled) return 0.0;
    double lo = kInfinity, hi = -kInfinity;
    for (std::size_t i = 0; i < avail.size(); ++i) {
      if (avail[i] <= 0.0) continue;
      lo = std::min(lo, sens(row, static_cast<Eigen::Index>(i)));
      hi = std::max(hi, sens(row, static_cast<Eigen::Index>(i)));
    }
    return hi > lo ? hi - lo : 0.0;
  };
  targets.movable.assign(targets.lines.size(), false);
  for (std::size_t k = 0; k < targets.lines.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(targets.lines[k]);
    const double s = std::max(spread(model.SV, row, inputs.demand, config.manipulate_load),
                              spread(model.SU_solar, row, inputs.solar_available, config.manipulate_solar));
    targets.movable[k] = s > 1e-9;
  }
}

AttackProgram build_attack_lp(const ShiftFactorModel& model, const AttackInputs& inputs, const TargetSets& targets,
                              const AttackConfig& config) {
  config.validate();
  require_size(inputs.demand.size(), model.load_count(), "demand");
  require_size(inputs.solar_available.size(), model.solar.size(), "solar output");
  require_size(inputs.base_flows.size(), model.line_count(), "base flows");
  require_size(inputs.flow_limits.size(), model.line_count(), "flow limits");
  if (targets.empty()) throw std::invalid_argument("attack LP needs at least one target line");

  AttackProgram p;
  p.inputs = inputs;
  p.targets = targets;
  p.config = config;
  auto& lp = p.lp;
  lp.set_sense(Sense::maximize);

  p.delta_d_var.assign(inputs.demand.size(), -1);
  std::vector<Term> load_sum;
  if (config.manipulate_load) {
    for (std::size_t i = 0; i < inputs.demand.size(); ++i) {
      const double D = inputs.demand[i];
      if (D <= 0.0) continue;
      auto v = lp.add_variable(fmt::format("dD[{}]", i), -config.tau * D, config.tau * D);
      p.delta_d_var[i] = static_cast<std::ptrdiff_t>(v);
      load_sum.push_back({v, 1.0});
    }
  }
  p.delta_r_var.assign(inputs.solar_available.size(), -1);
  std::vector<Term> solar_sum;
  if (config.manipulate_solar) {
    for (std::size_t j = 0; j < inputs.solar_available.size(); ++j) {
      const double R0 = inputs.solar_available[j];
      if (R0 <= 0.0) continue;
      auto v = lp.add_variable(fmt::format("dR[{}]", j), -config.alpha * R0, config.alpha * R0);
      p.delta_r_var[j] = static_cast<std::ptrdiff_t>(v);
      solar_sum.push_back({v, 1.0});
    }
  }

  for (std::size_t k = 0; k < targets.lines.size(); ++k) {
    const std::size_t l = targets.lines[k];
    const auto row = static_cast<Eigen::Index>(l);
    const double weight = config.objective == ObjectiveForm::directional ? targets.lambda[k] : 1.0;
    auto df = lp.add_variable(fmt::format("df[{}]", l), -kInfinity, kInfinity, weight);
    p.delta_f_var.push_back(df);

    // df_l - S_l U dR + S_l V dD = 0
    std::vector<Term> terms{{df, 1.0}};
    for (std::size_t j = 0; j < p.delta_r_var.size(); ++j) {
      const double s = model.SU_solar(row, static_cast<Eigen::Index>(j));
      if (p.delta_r_var[j] >= 0 && s != 0.0) terms.push_back({static_cast<std::size_t>(p.delta_r_var[j]), -s});
    }
    for (std::size_t i = 0; i < p.delta_d_var.size(); ++i) {
      const double s = model.SV(row, static_cast<Eigen::Index>(i));
      if (p.delta_d_var[i] >= 0 && s != 0.0) terms.push_back({static_cast<std::size_t>(p.delta_d_var[i]), s});
    }
    lp.add_constraint(fmt::format("flow_dev[{}]", l), std::move(terms), Relation::equal, 0.0);
  }

  for (std::size_t l : targets.overload_lines) {
    const std::size_t k = targets.position_of(l);
    const double lambda = targets.lambda[k];
    lp.add_constraint(fmt::format("overload[{}]", l), {{p.delta_f_var[k], lambda}}, Relation::greater_equal,
                      config.rho * inputs.flow_limits[l] - lambda * inputs.base_flows[l]);
  }
  if (!load_sum.empty()) lp.add_constraint("load_sum", std::move(load_sum), Relation::equal, 0.0);
  if (!solar_sum.empty()) lp.add_constraint("solar_sum", std::move(solar_sum), Relation::equal, 0.0);
  return p;
}

AttackVector AttackVector::zero(std::size_t loads, std::size_t solar_units, std::size_t lines) {
  AttackVector v;
  v.delta_D.assign(loads, 0.0);
  v.delta_R.assign(solar_units, 0.0);
  v.base_demand.assign(loads, 0.0);
  v.base_R0.assign(solar_units, 0.0);
  v.base_flows.assign(lines, 0.0);
  v.flow_limits.assign(lines, 0.0);
  return v;
}

const char* to_string(AttackStatus status) {
  switch (status) {
    case AttackStatus::feasible:
      return "feasible";
    case AttackStatus::infeasible:
      return "attack_infeasible";
    case AttackStatus::no_target:
      return "no_target";
  }
  return "?";
}

namespace {

std::string active_budgets(const AttackProgram& p) {
  const bool load = std::any_of(p.delta_d_var.begin(), p.delta_d_var.end(), [](auto v) { return v >= 0; });
  const bool solar = std::any_of(p.delta_r_var.begin(), p.delta_r_var.end(), [](auto v) { return v >= 0; });
  if (load && solar) return "load+solar";
  if (load) return "load";
  if (solar) return "solar";
  return "none";
}

std::vector<BudgetShortfall> diagnose(const ShiftFactorModel& model, const AttackProgram& p,
                                      const SimplexOptions& options) {
  TargetSets relaxed = p.targets;
  relaxed.overload_lines.clear();
  AttackConfig cfg = p.config;
  cfg.objective = ObjectiveForm::directional;
  std::vector<BudgetShortfall> out;
  for (std::size_t l : p.targets.overload_lines) {
    AttackProgram probe = build_attack_lp(model, p.inputs, relaxed, cfg);
    const std::size_t k = relaxed.position_of(l);
    for (std::size_t q = 0; q < probe.delta_f_var.size(); ++q) {
      probe.lp.set_cost(probe.delta_f_var[q], q == k ? relaxed.lambda[k] : 0.0);
    }
    auto sol = solve(probe.lp, options);
    BudgetShortfall s;
    s.line = l;
    s.required = p.config.rho * p.inputs.flow_limits[l] - relaxed.lambda[k] * p.inputs.base_flows[l];
    s.achievable = sol.status == SolveStatus::optimal ? sol.objective : 0.0;
    if (s.achievable < s.required) out.push_back(s);
  }
  return out;
}

}  // namespace

AttackOutcome solve_attack(const ShiftFactorModel& model, const AttackProgram& program,
                           const SimplexOptions& options) {
  AttackOutcome out;
  out.targets = program.targets;
  const auto sol = solve(program.lp, options);
  if (sol.status == SolveStatus::unbounded) {
    throw std::logic_error("attack LP reported unbounded although every manipulation is boxed");
  }
  if (sol.status == SolveStatus::infeasible) {
    out.status = AttackStatus::infeasible;
    out.binding_budget = active_budgets(program);
    out.shortfalls = diagnose(model, program, options);
    return out;
  }

  AttackVector v;
  v.config = program.config;
  v.targets = program.targets;
  v.delta_D.assign(program.delta_d_var.size(), 0.0);
  for (std::size_t i = 0; i < program.delta_d_var.size(); ++i) {
    if (program.delta_d_var[i] >= 0) v.delta_D[i] = sol.values[static_cast<std::size_t>(program.delta_d_var[i])];
  }
  v.delta_R.assign(program.delta_r_var.size(), 0.0);
  for (std::size_t j = 0; j < program.delta_r_var.size(); ++j) {
    if (program.delta_r_var[j] >= 0) v.delta_R[j] = sol.values[static_cast<std::size_t>(program.delta_r_var[j])];
  }
  for (auto var : program.delta_f_var) v.delta_f.push_back(sol.values[var]);
  v.objective = sol.objective;
  v.base_demand = program.inputs.demand;
  v.base_R0 = program.inputs.solar_available;
  v.base_flows = program.inputs.base_flows;
  v.flow_limits = program.inputs.flow_limits;

  out.status = AttackStatus::feasible;
  out.vector = std::move(v);
  return out;
}

AttackOutcome plan_attack(const NetworkCase& network, const ShiftFactorModel& model, const AttackInputs& inputs,
                          const AttackConfig& config, const SimplexOptions& options) {
  config.validate();
  TargetSets targets = select_target_lines(network, inputs.base_flows, config.xi);
  if (targets.empty()) {
    AttackOutcome out;
    out.status = AttackStatus::no_target;
    return out;
  }
  mark_movable_lines(targets, model, inputs, config);
  targets.overload_lines = choose_overload_subset(targets, config.subset);
  return solve_attack(model, build_attack_lp(model, inputs, targets, config), options);
}

double ConsistencyReport::max_flow_residual() const {
  double worst = 0.0;
  for (double r : flow_residual) worst = std::max(worst, r);
  return worst;
}

bool ConsistencyReport::physics_consistent() const {
  return load_sum_residual <= tolerance && solar_sum_residual <= tolerance && load_bound_excess <= kBoundSlack &&
         solar_bound_excess <= kBoundSlack && max_flow_residual() <= tolerance;
}

bool ConsistencyReport::targets_met() const {
  return std::all_of(overload_margin.begin(), overload_margin.end(), [&](double m) { return m >= -tolerance; });
}

ConsistencyReport verify_consistency(const AttackVector& vector, const ShiftFactorModel& model) {
  ConsistencyReport r;
  r.load_sum_residual = std::abs(std::accumulate(vector.delta_D.begin(), vector.delta_D.end(), 0.0));
  r.solar_sum_residual = std::abs(std::accumulate(vector.delta_R.begin(), vector.delta_R.end(), 0.0));

  r.load_bound_excess = vector.delta_D.empty() ? 0.0 : -kInfinity;
  for (std::size_t i = 0; i < vector.delta_D.size(); ++i) {
    const double D = i < vector.base_demand.size() ? vector.base_demand[i] : 0.0;
    r.load_bound_excess = std::max(r.load_bound_excess, std::abs(vector.delta_D[i]) - vector.config.tau * D);
  }
  r.solar_bound_excess = vector.delta_R.empty() ? 0.0 : -kInfinity;
  for (std::size_t j = 0; j < vector.delta_R.size(); ++j) {
    const double R0 = j < vector.base_R0.size() ? vector.base_R0[j] : 0.0;
    r.solar_bound_excess = std::max(r.solar_bound_excess, std::abs(vector.delta_R[j]) - vector.config.alpha * R0);
  }

  const Eigen::VectorXd df = flow_deviation(model, vector.delta_R, vector.delta_D);
  for (std::size_t k = 0; k < vector.targets.lines.size(); ++k) {
    const double reported = k < vector.delta_f.size() ? vector.delta_f[k] : 0.0;
    r.flow_residual.push_back(std::abs(reported - df(static_cast<Eigen::Index>(vector.targets.lines[k]))));
  }
  for (std::size_t l : vector.targets.overload_lines) {
    const std::size_t k = vector.targets.position_of(l);
    const double lambda = vector.targets.lambda[k];
    const double dfl = k < vector.delta_f.size() ? vector.delta_f[k] : 0.0;
    r.overload_margin.push_back(lambda * (vector.base_flows[l] + dfl) - vector.config.rho * vector.flow_limits[l]);
  }
  return r;
}

}  // namespace solarlr
