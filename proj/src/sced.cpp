#include "solarlr/sced.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <fmt/core.h>

namespace solarlr {

namespace {

std::uint64_t mix(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix_double(std::uint64_t h, double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  return mix(h, &v, sizeof v);
}

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw std::invalid_argument(fmt::format("{} has {} entries, expected {}", what, got, want));
}

}  // namespace

ScedProgram build_sced_lp(const NetworkCase& network, const ShiftFactorModel& model,
                          std::span<const double> solar_available, const AttackVector* attack,
                          const ScedOptions& options) {
  const std::size_t nc = model.conventional.size();
  const std::size_t ns = model.solar.size();
  const std::size_t nd = model.load_count();
  const std::size_t nl = model.line_count();
  require_size(solar_available.size(), ns, "solar output");
  require_size(network.loads.size(), nd, "case loads");
  if (attack) {
    require_size(attack->delta_D.size(), nd, "attack dD");
    require_size(attack->delta_R.size(), ns, "attack dR");
  }

  ScedProgram p;
  auto& lp = p.lp;
  lp.set_sense(Sense::minimize);

  std::vector<Term> balance;
  for (std::size_t k = 0; k < nc; ++k) {
    const auto& g = network.generators[model.conventional[k]];
    p.p_var.push_back(lp.add_variable(fmt::format("P[{}]", g.id), g.p_min, g.p_max, g.marginal_cost));
    balance.push_back({p.p_var.back(), 1.0});
  }
  for (std::size_t k = 0; k < ns; ++k) {
    const auto& g = network.generators[model.solar[k]];
    if (solar_available[k] < 0.0) throw std::invalid_argument(fmt::format("solar unit {} has negative R0", g.id));
    const double c = options.solar_cost.value_or(g.marginal_cost);
    p.r_var.push_back(lp.add_variable(fmt::format("R[{}]", g.id), 0.0, solar_available[k], c));
    balance.push_back({p.r_var.back(), 1.0});
  }
  double total_demand = 0.0;
  for (std::size_t i = 0; i < nd; ++i) {
    const auto& load = network.loads[i];
    const double seen = load.demand + (attack ? attack->delta_D[i] : 0.0);
    p.j_var.push_back(lp.add_variable(fmt::format("J[{}]", load.id), 0.0, std::max(0.0, seen), load.shed_cost));
    balance.push_back({p.j_var.back(), 1.0});
    total_demand += load.demand;
  }
  lp.add_constraint("balance", std::move(balance), Relation::equal, total_demand);

  Eigen::VectorXd seen_demand(static_cast<Eigen::Index>(nd));
  for (std::size_t i = 0; i < nd; ++i) {
    seen_demand(static_cast<Eigen::Index>(i)) = network.loads[i].demand + (attack ? attack->delta_D[i] : 0.0);
  }
  p.flow_constant = -model.SV * seen_demand;
  if (attack) {
    p.flow_constant += model.SU_solar * Eigen::Map<const Eigen::VectorXd>(attack->delta_R.data(),
                                                                         static_cast<Eigen::Index>(ns));
  }

  p.f_var.assign(nl, -1);
  for (std::size_t l = 0; l < nl; ++l) {
    const double fmax = model.flow_limits[l];
    if (fmax <= 0.0) continue;
    const auto row = static_cast<Eigen::Index>(l);
    const auto f = lp.add_variable(fmt::format("F[{}]", model.branch_ids[l]), -fmax, fmax);
    p.f_var[l] = static_cast<std::ptrdiff_t>(f);
    std::vector<Term> terms{{f, 1.0}};
    for (std::size_t k = 0; k < nc; ++k) {
      const double s = model.SU_conventional(row, static_cast<Eigen::Index>(k));
      if (s != 0.0) terms.push_back({p.p_var[k], -s});
    }
    for (std::size_t k = 0; k < ns; ++k) {
      const double s = model.SU_solar(row, static_cast<Eigen::Index>(k));
      if (s != 0.0) terms.push_back({p.r_var[k], -s});
    }
    for (std::size_t i = 0; i < nd; ++i) {
      const double s = model.SV(row, static_cast<Eigen::Index>(i));
      if (s != 0.0) terms.push_back({p.j_var[i], -s});
    }
    lp.add_constraint(fmt::format("flow[{}]", model.branch_ids[l]), std::move(terms), Relation::equal,
                      p.flow_constant(row));
  }

  if (attack) p.attack = *attack;

  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto cf = case_fingerprint(network);
  h = mix(h, &cf, sizeof cf);
  h = mix_double(h, options.solar_cost ? *options.solar_cost : -1.0);
  for (double r : solar_available) h = mix_double(h, r);
  p.fingerprint = h;
  return p;
}

const char* to_string(ScedStatus status) {
  return status == ScedStatus::optimal ? "optimal" : "sced_infeasible";
}

ScedOutcome solve_sced(const ScedProgram& program, const ShiftFactorModel& model, const SimplexOptions& options) {
  ScedOutcome out;
  const auto sol = solve(program.lp, options);
  out.iterations = sol.iterations;
  if (sol.status == SolveStatus::unbounded) {
    throw std::logic_error("dispatch LP reported unbounded although every variable is boxed");
  }
  if (sol.status != SolveStatus::optimal) return out;

  DispatchResult d;
  for (auto v : program.p_var) d.P.push_back(sol.values[v]);
  for (auto v : program.r_var) d.R.push_back(sol.values[v]);
  for (auto v : program.j_var) d.J.push_back(sol.values[v]);
  const auto map = [](const std::vector<double>& x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  };
  Eigen::VectorXd F = model.SU_conventional * map(d.P) + model.SU_solar * map(d.R) + model.SV * map(d.J) +
                      program.flow_constant;
  d.F.assign(F.data(), F.data() + F.size());
  d.cost = sol.objective;
  d.shed_total = std::accumulate(d.J.begin(), d.J.end(), 0.0);
  d.attack = program.attack;
  d.fingerprint = program.fingerprint;

  out.status = ScedStatus::optimal;
  out.dispatch = std::move(d);
  return out;
}

ScedOutcome run_sced(const NetworkCase& network, const ShiftFactorModel& model,
                     std::span<const double> solar_available, const AttackVector* attack, const ScedOptions& options,
                     const SimplexOptions& simplex) {
  return solve_sced(build_sced_lp(network, model, solar_available, attack, options), model, simplex);
}

PhysicalFlowReport evaluate_true_flows(const DispatchResult& result, const ShiftFactorModel& model,
                                       std::span<const double> demand) {
  const std::vector<double> zero_r(result.R.size(), 0.0);
  const std::vector<double> zero_d(result.J.size(), 0.0);
  const Eigen::VectorXd f = compute_flows(model, result.P, result.R, demand, result.J, zero_r, zero_d);
  PhysicalFlowReport r;
  r.flow.assign(f.data(), f.data() + f.size());
  for (std::size_t l = 0; l < r.flow.size(); ++l) {
    const double fmax = model.flow_limits[l];
    r.loading.push_back(fmax > 0.0 ? std::abs(r.flow[l]) / fmax : 0.0);
    if (r.loading.back() > 1.0) r.overloaded.push_back(l);
  }
  return r;
}

ImpactMetrics impact_metrics(const DispatchResult& pre, const DispatchResult& post) {
  if (pre.fingerprint != post.fingerprint) {
    throw FingerprintMismatch(fmt::format("dispatch fingerprints differ ({:016x} vs {:016x})", pre.fingerprint,
                                          post.fingerprint));
  }
  ImpactMetrics m;
  m.pre_cost = pre.cost;
  m.post_cost = post.cost;
  m.cost_increase = post.cost - pre.cost;
  m.shed_total = post.shed_total;
  m.shed_increase = post.shed_total - pre.shed_total;
  return m;
}

}  // namespace solarlr
