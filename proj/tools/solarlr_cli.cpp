// solarlr: command-line front end for the attack pipeline.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "solarlr/io.hpp"
#include "solarlr/report.hpp"

namespace {

using namespace solarlr;

constexpr int kExitOk = 0;
constexpr int kExitAttackInfeasible = 2;
constexpr int kExitScedInfeasible = 3;
constexpr int kExitInputError = 4;

constexpr const char* kFooter =
    "Exit codes:\n"
    "  0  success\n"
    "  2  attack infeasible (overload target unreachable within the budgets)\n"
    "  3  SCED infeasible\n"
    "  4  input error (missing or malformed file, bad parameter)\n"
    "\n"
    "Runs are deterministic; --seed is accepted and ignored.";

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  RunConfig run;
  std::string subset = "top1";
  bool verbatim = false;
  std::string linearization = "secant";
  std::string pricing = "bland";
  std::optional<double> solar_cost;
  std::optional<double> shed_cost;
  std::optional<int> slack;
  std::optional<std::uint64_t> seed;
  std::string scenario;
  std::string dump_lp;
  std::string dump_ptdf;
  std::string attack_file;
  std::vector<double> alphas{0.25, 0.5, 0.75};
};

RunConfig finalize(Flags& f) {
  RunConfig c = f.run;
  try {
    c.attack.subset = SubsetStrategy::parse(f.subset);
    c.attack.objective = f.verbatim ? ObjectiveForm::verbatim : ObjectiveForm::directional;
    c.attack.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  c.case_options.linearization = f.linearization == "linear" ? CostLinearization::linear : CostLinearization::secant;
  c.case_options.shed_cost = f.shed_cost;
  c.simplex.pricing = f.pricing == "dantzig" ? PricingRule::dantzig : PricingRule::bland;
  c.sced.solar_cost = f.solar_cost;
  c.slack = f.slack;
  if (c.format != "csv" && c.format != "json") throw InputError("--format must be csv or json");
  return c;
}

Pipeline open_pipeline(const RunConfig& c) {
  try {
    return load_pipeline(c);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

const IrradianceProfile& pick_profile(const Pipeline& p, const std::string& label) {
  try {
    return label.empty() ? peak_profile(p) : p.matrix().find(label);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

std::string out_path(const RunConfig& c, const std::string& name) { return c.out_dir + "/" + name; }

void print_scenario(const ScenarioResult& r, const Pipeline& p) {
  fmt::print("scenario {}: R0 {:.3f} MW, status {}\n", r.label, r.r0_total, to_string(r.status));
  if (r.pre) fmt::print("  pre-attack cost   {:.6f} $/h, shed {:.6f} MW\n", r.pre->cost, r.pre->shed_total);
  if (r.attack.vector) {
    fmt::print("  attack objective  {:.6f} MW over {} target line(s), {} overloaded\n", r.attack.vector->objective,
               r.attack.targets.lines.size(), r.attack.targets.overload_lines.size());
  }
  if (r.attack.status == AttackStatus::infeasible) {
    fmt::print("  attack infeasible, budgets in play: {}\n", r.attack.binding_budget);
    for (const auto& s : r.attack.shortfalls) {
      fmt::print("    branch {} needs {:.3f} MW, budgets reach {:.3f} MW\n", p.model.branch_ids[s.line], s.required,
                 s.achievable);
    }
  }
  if (r.metrics && r.attack_feasible()) {
    fmt::print("  post-attack cost  {:.6f} $/h (+{:.6f}), shed {:.6f} MW\n", r.metrics->post_cost,
               r.metrics->cost_increase, r.metrics->shed_total);
  }
  if (r.status == ScenarioStatus::post_infeasible) fmt::print("  attack caused operator infeasibility\n");
}

int exit_for(const ScenarioResult& r) {
  switch (r.status) {
    case ScenarioStatus::ok:
    case ScenarioStatus::no_target:
      return kExitOk;
    case ScenarioStatus::attack_infeasible:
      return kExitAttackInfeasible;
    case ScenarioStatus::pre_infeasible:
    case ScenarioStatus::post_infeasible:
      return kExitScedInfeasible;
  }
  return kExitOk;
}

int cmd_attack(Flags& f) {
  const auto c = finalize(f);
  const auto p = open_pipeline(c);
  const auto& profile = pick_profile(p, f.scenario);
  if (!f.dump_ptdf.empty()) write_shift_factor_csv(p.model, f.dump_ptdf);
  const auto r = run_profile(p, profile, c.attack);
  if (!f.dump_lp.empty() && r.pre) {
    AttackInputs in{p.network.demand_vector(), r.R0, r.pre->F, p.model.flow_limits};
    auto targets = select_target_lines(p.network, in.base_flows, c.attack.xi);
    if (!targets.empty()) {
      mark_movable_lines(targets, p.model, in, c.attack);
      targets.overload_lines = choose_overload_subset(targets, c.attack.subset);
      std::ostringstream lp;
      write_lp_format(build_attack_lp(p.model, in, targets, c.attack).lp, lp);
      write_file(f.dump_lp, lp.str());
    }
  }
  print_scenario(r, p);
  const auto path = out_path(c, "attack_" + file_stem(r.label) + ".json");
  write_file(path, scenario_artifact(r, p).dump(2) + "\n");
  fmt::print("wrote {}\n", path);
  return exit_for(r);
}

int cmd_sced(Flags& f) {
  const auto c = finalize(f);
  const auto p = open_pipeline(c);
  const auto& profile = pick_profile(p, f.scenario);
  const auto R0 = fleet_output(p.fleet, profile);
  std::optional<AttackVector> attack;
  if (!f.attack_file.empty()) {
    try {
      auto doc = nlohmann::json::parse(read_text_file(f.attack_file));
      attack = attack_from_json(doc.contains("attack") ? doc.at("attack") : doc, p.network, p.model);
    } catch (const std::exception& e) {
      throw InputError(fmt::format("{}: {}", f.attack_file, e.what()));
    }
  }
  const auto out = run_sced(p.network, p.model, R0, attack ? &*attack : nullptr, c.sced, c.simplex);
  if (out.status != ScedStatus::optimal) {
    fmt::print("scenario {}: SCED infeasible\n", profile.label());
    return kExitScedInfeasible;
  }
  const auto& d = *out.dispatch;
  const auto phys = evaluate_true_flows(d, p.model, p.network.demand_vector());
  fmt::print("scenario {}: cost {:.6f} $/h, shed {:.6f} MW, {} physically overloaded line(s)\n", profile.label(),
             d.cost, d.shed_total, phys.overloaded.size());
  const auto path = out_path(c, "dispatch_" + file_stem(profile.label()) + ".json");
  write_file(path, dispatch_to_json(d, p.network, p.model).dump(2) + "\n");
  fmt::print("wrote {}\n", path);
  return kExitOk;
}

int cmd_matrix(Flags& f) {
  const auto c = finalize(f);
  const auto p = open_pipeline(c);
  if (!p.scenarios) throw InputError("matrix needs --irradiance");
  const auto results = run_matrix(p, c.attack, c.jobs);
  if (c.format == "csv") {
    write_file(out_path(c, "matrix.csv"), matrix_csv(results));
  } else {
    write_file(out_path(c, "matrix.json"), matrix_json(results).dump(2) + "\n");
  }
  write_plot_series(c.out_dir, results);
  for (const auto& r : results) {
    write_file(out_path(c, "artifacts/" + file_stem(r.label) + ".json"), scenario_artifact(r, p).dump(2) + "\n");
  }
  for (const auto& r : results) {
    fmt::print("{:<22} R0 {:9.3f}  {:<20}", r.label, r.r0_total, to_string(r.status));
    if (r.metrics) fmt::print("  +{:12.3f} $/h  shed {:9.3f} MW", r.metrics->cost_increase, r.metrics->shed_total);
    fmt::print("  {:.2f}s\n", r.seconds);
  }
  fmt::print("wrote {}/matrix.{}\n", c.out_dir, c.format);
  return kExitOk;
}

int cmd_alpha_sweep(Flags& f) {
  const auto c = finalize(f);
  for (double a : f.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw InputError(fmt::format("alpha {} outside [0, 1]", a));
  }
  const auto p = open_pipeline(c);
  const auto& profile = pick_profile(p, f.scenario);
  const auto sweep = alpha_sweep(p, c.attack, f.alphas, profile);
  if (c.format == "csv") {
    write_file(out_path(c, "alpha_sweep.csv"), sweep_csv(sweep));
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
      rows.push_back({{"alpha", sweep.alphas[i]}, {"row", matrix_json({sweep.rows[i]})["scenarios"][0]}});
    }
    write_file(out_path(c, "alpha_sweep.json"),
               nlohmann::json{{"scenario", profile.label()},
                              {"rows", rows},
                              {"non_decreasing", sweep.non_decreasing},
                              {"strictly_increasing", sweep.strictly_increasing},
                              {"above_baseline", sweep.above_baseline}}
                       .dump(2) +
                   "\n");
  }
  fmt::print("alpha sweep at {}\n", profile.label());
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    fmt::print("  alpha {:.2f}: ", sweep.alphas[i]);
    const auto& r = sweep.rows[i];
    if (r.metrics) {
      fmt::print("post {:.3f} $/h, +{:.3f}, shed {:.3f} MW ({})\n", r.metrics->post_cost, r.metrics->cost_increase,
                 r.metrics->shed_total, to_string(r.status));
    } else {
      fmt::print("{}\n", to_string(r.status));
    }
  }
  fmt::print("non-decreasing: {}, strictly increasing: {}, above baseline: {}\n", sweep.non_decreasing,
             sweep.strictly_increasing, sweep.above_baseline);
  return kExitOk;
}

int cmd_coordination(Flags& f) {
  const auto c = finalize(f);
  const auto p = open_pipeline(c);
  const auto& profile = pick_profile(p, f.scenario);
  const auto study = coordination_study(p, c.attack, profile);
  write_file(out_path(c, "coordination.csv"), coordination_csv(study));
  fmt::print("coordination study at {}\n", profile.label());
  print_scenario(study.solar_only, p);
  print_scenario(study.coordinated, p);
  if (auto adv = study.advantage()) fmt::print("coordinated minus solar-only increase: {:.6f} $/h\n", *adv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;
  f.run.case_path = SOLARLR_DATA_DIR "/case118.m";
  f.run.solar_ids_path = SOLARLR_DATA_DIR "/solar_ids_118.txt";
  f.run.irradiance_path = SOLARLR_DATA_DIR "/irradiance_sample.csv";

  CLI::App app{"Load-redistribution attacks with falsified solar output on a DC network model"};
  app.footer(kFooter);
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags; flags win");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--case", f.run.case_path, "MATPOWER case file")->capture_default_str();
  app.add_option("--solar-ids", f.run.solar_ids_path, "generator ids treated as solar units")->capture_default_str();
  app.add_option("--irradiance", f.run.irradiance_path, "irradiance scenario CSV")->capture_default_str();
  app.add_option("--tau", f.run.attack.tau, "load manipulation factor")->capture_default_str();
  app.add_option("--alpha", f.run.attack.alpha, "solar manipulation factor")->capture_default_str();
  app.add_option("--xi", f.run.attack.xi, "line selection threshold")->capture_default_str();
  app.add_option("--rho", f.run.attack.rho, "overload factor")->capture_default_str();
  app.add_option("--subset", f.subset, "overload subset: top1, topk:<k> or all")->capture_default_str();
  app.add_option("--slack", f.slack, "reference bus id override");
  app.add_option("--out", f.run.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", f.run.format, "report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--seed", f.seed, "reserved; runs are deterministic");
  app.add_flag("--verbatim-objective", f.verbatim, "maximize the raw sum of flow deviations");
  app.add_option("--solar-cost", f.solar_cost, "uniform solar $/MWh (default: each unit's case cost)");
  app.add_option("--shed-cost", f.shed_cost, "uniform shedding $/MWh (default: 10x dearest unit)");
  app.add_option("--linearization", f.linearization, "quadratic cost handling")
      ->check(CLI::IsMember({"secant", "linear"}))
      ->capture_default_str();
  app.add_option("--pricing", f.pricing, "simplex pricing rule")
      ->check(CLI::IsMember({"bland", "dantzig"}))
      ->capture_default_str();
  app.add_option("--jobs", f.run.jobs, "parallel scenario solves")->check(CLI::PositiveNumber)->capture_default_str();

  auto* attack = app.add_subcommand("attack", "solve one attack and write its JSON record");
  attack->add_option("--scenario", f.scenario, "scenario label such as June-afternoon (default: peak R0)");
  attack->add_option("--dump-lp", f.dump_lp, "write the attack LP in CPLEX LP format");
  attack->add_option("--dump-ptdf", f.dump_ptdf, "write the shift-factor matrix as CSV");

  auto* sced = app.add_subcommand("sced", "solve the operator dispatch, optionally under a recorded attack");
  sced->add_option("--scenario", f.scenario, "scenario label (default: peak R0)");
  sced->add_option("--attack-file", f.attack_file, "attack JSON written by the attack subcommand");

  app.add_subcommand("matrix", "run every scenario; write matrix, plot series and artifacts");

  auto* sweep = app.add_subcommand("alpha-sweep", "vary alpha at one scenario");
  sweep->add_option("--scenario", f.scenario, "scenario label (default: peak R0)");
  sweep->add_option("--alphas", f.alphas, "alpha values")->delimiter(',')->capture_default_str();

  auto* coord = app.add_subcommand("coordination", "solar-only against coordinated manipulation");
  coord->add_option("--scenario", f.scenario, "scenario label (default: peak R0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (attack->parsed()) return cmd_attack(f);
    if (sced->parsed()) return cmd_sced(f);
    if (app.got_subcommand("matrix")) return cmd_matrix(f);
    if (sweep->parsed()) return cmd_alpha_sweep(f);
    if (coord->parsed()) return cmd_coordination(f);
  } catch (const InputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return kExitOk;
}
