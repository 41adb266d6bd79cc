#include "solarlr/report.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>

#include <fmt/core.h>

#include "solarlr/io.hpp"

namespace solarlr {

using nlohmann::json;

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  const double x = *v == 0.0 ? 0.0 : *v;  // no "-0.000000"
  auto s = fmt::format("{:.6f}", x);
  return s == "-0.000000" ? "0.000000" : s;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

MetricsRow metrics_row(const ScenarioResult& r) {
  MetricsRow row;
  row.scenario = r.label;
  row.feasible = r.attack_feasible();
  if (r.pre) row.pre_cost = r.pre->cost;
  if (r.metrics) {
    row.post_cost = r.metrics->post_cost;
    row.increase = r.metrics->cost_increase;
    row.shed_mw = r.metrics->shed_total;
  }
  if (r.attack.vector) row.attack_objective = r.attack.vector->objective;
  return row;
}

std::string format_row(const MetricsRow& row) {
  return fmt::format("{},{},{},{},{},{},{}", row.scenario, cell(row.pre_cost), cell(row.post_cost),
                     cell(row.increase), cell(row.shed_mw), cell(row.attack_objective), row.feasible ? 1 : 0);
}

std::string matrix_csv(const std::vector<ScenarioResult>& results) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : results) out += format_row(metrics_row(r)) + "\n";
  return out;
}

json matrix_json(const std::vector<ScenarioResult>& results) {
  json rows = json::array();
  for (const auto& r : results) {
    const auto m = metrics_row(r);
    rows.push_back({{"scenario", m.scenario},
                    {"r0_mw", r.r0_total},
                    {"status", to_string(r.status)},
                    {"pre_cost", nullable(m.pre_cost)},
                    {"post_cost", nullable(m.post_cost)},
                    {"increase", nullable(m.increase)},
                    {"shed_mw", nullable(m.shed_mw)},
                    {"attack_objective", nullable(m.attack_objective)},
                    {"feasible", m.feasible}});
  }
  return {{"scenarios", rows}};
}

json scenario_artifact(const ScenarioResult& r, const Pipeline& p) {
  json R0 = json::array();
  for (std::size_t k = 0; k < r.R0.size(); ++k) {
    R0.push_back({{"generator", p.network.generators[p.model.solar[k]].id}, {"value", r.R0[k]}});
  }
  json doc = {{"scenario", r.label},
              {"status", to_string(r.status)},
              {"attack_status", to_string(r.attack.status)},
              {"config", config_to_json(r.config)},
              {"r0_total", r.r0_total},
              {"R0", R0}};
  doc["pre"] = r.pre ? dispatch_to_json(*r.pre, p.network, p.model) : json(nullptr);
  doc["post"] = r.post ? dispatch_to_json(*r.post, p.network, p.model) : json(nullptr);
  doc["attack"] = r.attack.vector ? attack_to_json(*r.attack.vector, p.network, p.model) : json(nullptr);
  if (r.attack.status == AttackStatus::infeasible) {
    json gaps = json::array();
    for (const auto& s : r.attack.shortfalls) {
      gaps.push_back({{"branch", p.model.branch_ids[s.line]}, {"required", s.required}, {"achievable", s.achievable}});
    }
    doc["binding_budget"] = r.attack.binding_budget;
    doc["shortfalls"] = gaps;
  }
  return doc;
}

MetricsRow row_from_artifact(const json& a, const Pipeline& p) {
  MetricsRow row;
  row.scenario = a.at("scenario").get<std::string>();
  row.feasible = a.at("attack_status").get<std::string>() == to_string(AttackStatus::feasible);
  std::optional<DispatchResult> pre, post;
  if (!a.at("pre").is_null()) pre = dispatch_from_json(a.at("pre"), p.network, p.model);
  if (!a.at("post").is_null()) post = dispatch_from_json(a.at("post"), p.network, p.model);
  if (pre) row.pre_cost = pre->cost;
  if (pre && post) {
    const auto m = impact_metrics(*pre, *post);
    row.post_cost = m.post_cost;
    row.increase = m.cost_increase;
    row.shed_mw = m.shed_total;
  }
  if (!a.at("attack").is_null()) row.attack_objective = attack_from_json(a.at("attack"), p.network, p.model).objective;
  return row;
}

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

std::string file_stem(const std::string& label) {
  std::string s;
  for (char c : label) s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
  return s;
}

std::vector<std::string> write_plot_series(const std::string& dir, const std::vector<ScenarioResult>& results) {
  struct Panel {
    const char* name;
    std::optional<double> (*value)(const ScenarioResult&);
  };
  static const Panel panels[] = {
      {"fig_r0.csv", [](const ScenarioResult& r) -> std::optional<double> { return r.r0_total; }},
      {"fig_post_cost.csv",
       [](const ScenarioResult& r) -> std::optional<double> {
         return r.metrics ? std::optional(r.metrics->post_cost) : std::nullopt;
       }},
      {"fig_cost_increase.csv",
       [](const ScenarioResult& r) -> std::optional<double> {
         return r.metrics ? std::optional(r.metrics->cost_increase) : std::nullopt;
       }},
      {"fig_shedding.csv",
       [](const ScenarioResult& r) -> std::optional<double> {
         return r.metrics ? std::optional(r.metrics->shed_total) : std::nullopt;
       }},
  };
  std::vector<std::string> written;
  for (const auto& panel : panels) {
    std::string body = "x,scenario,y\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      body += fmt::format("{},{},{}\n", i, results[i].label, cell(panel.value(results[i])));
    }
    const auto path = (std::filesystem::path(dir) / panel.name).string();
    write_file(path, body);
    written.push_back(path);
  }
  return written;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "alpha,pre_cost,post_cost,increase,shed_mw,attack_objective,feasible\n";
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    auto row = metrics_row(sweep.rows[i]);
    row.scenario = fmt::format("{:.2f}", sweep.alphas[i]);
    out += format_row(row) + "\n";
  }
  return out;
}

std::string coordination_csv(const CoordinationResult& study) {
  std::string out = "mode,pre_cost,post_cost,increase,shed_mw,attack_objective,feasible,increase_vs_solar_only\n";
  auto solar = metrics_row(study.solar_only);
  solar.scenario = "solar_only";
  out += format_row(solar) + ",0.000000\n";
  auto full = metrics_row(study.coordinated);
  full.scenario = "coordinated";
  out += format_row(full) + "," + cell(study.advantage()) + "\n";
  return out;
}

}  // namespace solarlr
