#include "solarlr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <numeric>
#include <thread>

#include <fmt/core.h>

namespace solarlr {

const ScenarioMatrix& Pipeline::matrix() const {
  if (!scenarios) throw std::invalid_argument("no irradiance file given");
  return *scenarios;
}

Pipeline load_pipeline(const RunConfig& config) {
  config.attack.validate();
  Pipeline p;
  p.config = config;
  NetworkCase raw = load_case_file(config.case_path, config.case_options);
  std::vector<int> ids;
  try {
    ids = load_solar_selection_file(config.solar_ids_path);
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", config.solar_ids_path, e.what()));
  }
  p.network = designate_solar(raw, ids);
  p.model = build_shift_factors(p.network, config.slack);
  p.fleet = make_fleet(p.network, config.solar);
  if (!config.irradiance_path.empty()) p.scenarios = load_irradiance_file(config.irradiance_path);
  return p;
}

const char* to_string(ScenarioStatus status) {
  switch (status) {
    case ScenarioStatus::ok:
      return "ok";
    case ScenarioStatus::no_target:
      return "no_target";
    case ScenarioStatus::attack_infeasible:
      return "attack_infeasible";
    case ScenarioStatus::pre_infeasible:
      return "pre_sced_infeasible";
    case ScenarioStatus::post_infeasible:
      return "post_sced_infeasible";
  }
  return "?";
}

ScenarioResult run_scenario(const Pipeline& pipeline, std::string label, std::vector<double> R0,
                            const AttackConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto& simplex = pipeline.config.simplex;
  ScenarioResult r;
  r.label = std::move(label);
  r.R0 = std::move(R0);
  r.r0_total = std::accumulate(r.R0.begin(), r.R0.end(), 0.0);
  r.config = config;

  auto finish = [&]() -> ScenarioResult {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(r);
  };

  auto pre = run_sced(pipeline.network, pipeline.model, r.R0, nullptr, pipeline.config.sced, simplex);
  if (pre.status != ScedStatus::optimal) {
    r.status = ScenarioStatus::pre_infeasible;
    return finish();
  }
  r.pre = std::move(pre.dispatch);

  AttackInputs inputs;
  inputs.demand = pipeline.network.demand_vector();
  inputs.solar_available = r.R0;
  inputs.base_flows = r.pre->F;
  inputs.flow_limits = pipeline.model.flow_limits;
  r.attack = plan_attack(pipeline.network, pipeline.model, inputs, config, simplex);

  if (r.attack.status != AttackStatus::feasible) {
    r.status = r.attack.status == AttackStatus::no_target ? ScenarioStatus::no_target
                                                           : ScenarioStatus::attack_infeasible;
    r.post = r.pre;
    r.metrics = impact_metrics(*r.pre, *r.post);
    return finish();
  }

  auto post = run_sced(pipeline.network, pipeline.model, r.R0, &*r.attack.vector, pipeline.config.sced, simplex);
  if (post.status != ScedStatus::optimal) {
    r.status = ScenarioStatus::post_infeasible;
    return finish();
  }
  r.post = std::move(post.dispatch);
  r.metrics = impact_metrics(*r.pre, *r.post);
  r.status = ScenarioStatus::ok;
  return finish();
}

ScenarioResult run_profile(const Pipeline& pipeline, const IrradianceProfile& profile, const AttackConfig& config) {
  return run_scenario(pipeline, profile.label(), fleet_output(pipeline.fleet, profile), config);
}

std::vector<ScenarioResult> run_matrix(const Pipeline& pipeline, const AttackConfig& config, unsigned jobs) {
  const auto& profiles = pipeline.matrix().profiles;
  std::vector<ScenarioResult> results(profiles.size());
  std::vector<std::exception_ptr> errors(profiles.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < profiles.size(); i = next++) {
      try {
        results[i] = run_profile(pipeline, profiles[i], config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(profiles.size(), 1)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

const IrradianceProfile& peak_profile(const Pipeline& pipeline) {
  const auto& profiles = pipeline.matrix().profiles;
  if (profiles.empty()) throw std::invalid_argument("scenario matrix is empty");
  std::size_t best = 0;
  double best_total = -1.0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto out = fleet_output(pipeline.fleet, profiles[i]);
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    if (total > best_total) {
      best_total = total;
      best = i;
    }
  }
  return profiles[best];
}

SweepResult alpha_sweep(const Pipeline& pipeline, const AttackConfig& base, std::vector<double> alphas,
                        const IrradianceProfile& profile) {
  std::sort(alphas.begin(), alphas.end());
  SweepResult s;
  s.alphas = alphas;
  for (double a : alphas) {
    AttackConfig cfg = base;
    cfg.alpha = a;
    s.rows.push_back(run_profile(pipeline, profile, cfg));
  }
  s.non_decreasing = s.strictly_increasing = s.above_baseline = true;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& m = s.rows[i].metrics;
    if (!m) {
      s.non_decreasing = s.strictly_increasing = s.above_baseline = false;
      continue;
    }
    if (m->post_cost < m->pre_cost - 1e-6) s.above_baseline = false;
    if (i == 0 || !s.rows[i - 1].metrics) continue;
    const auto& prev = *s.rows[i - 1].metrics;
    if (m->post_cost < prev.post_cost - 1e-6 || m->shed_total < prev.shed_total - 1e-6) s.non_decreasing = false;
    if (!(m->cost_increase > prev.cost_increase)) s.strictly_increasing = false;
  }
  return s;
}

std::optional<double> CoordinationResult::advantage() const {
  if (!solar_only.metrics || !coordinated.metrics) return std::nullopt;
  return coordinated.metrics->cost_increase - solar_only.metrics->cost_increase;
}

CoordinationResult coordination_study(const Pipeline& pipeline, const AttackConfig& base,
                                      const IrradianceProfile& profile) {
  AttackConfig solar_only = base;
  solar_only.manipulate_load = false;
  AttackConfig full = base;
  full.manipulate_load = true;
  return {run_profile(pipeline, profile, solar_only), run_profile(pipeline, profile, full)};
}

}  // namespace solarlr
