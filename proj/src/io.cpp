#include "solarlr/io.hpp"

#include <algorithm>
#include <map>

#include <fmt/core.h>

namespace solarlr {

using nlohmann::json;

namespace {

json keyed(const char* key, const std::vector<int>& ids, const std::vector<double>& values) {
  json arr = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) arr.push_back({{key, ids.at(i)}, {"value", values[i]}});
  return arr;
}

std::vector<double> unkeyed(const json& arr, const char* key, const std::vector<int>& ids, const char* what) {
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
  std::vector<double> out(ids.size(), 0.0);
  std::vector<bool> seen(ids.size(), false);
  for (const auto& e : arr) {
    const int id = e.at(key).get<int>();
    auto it = pos.find(id);
    if (it == pos.end()) throw std::invalid_argument(fmt::format("{}: unknown {} {}", what, key, id));
    if (seen[it->second]) throw std::invalid_argument(fmt::format("{}: {} {} listed twice", what, key, id));
    seen[it->second] = true;
    out[it->second] = e.at("value").get<double>();
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen[i]) throw std::invalid_argument(fmt::format("{}: {} {} missing", what, key, ids[i]));
  }
  return out;
}

std::vector<int> load_ids(const NetworkCase& network) {
  std::vector<int> ids;
  for (const auto& l : network.loads) ids.push_back(l.id);
  return ids;
}

std::vector<int> unit_ids(const NetworkCase& network, const std::vector<std::size_t>& positions) {
  std::vector<int> ids;
  for (auto p : positions) ids.push_back(network.generators[p].id);
  return ids;
}

std::size_t line_position(const ShiftFactorModel& model, int branch_id) {
  for (std::size_t l = 0; l < model.branch_ids.size(); ++l) {
    if (model.branch_ids[l] == branch_id) return l;
  }
  throw std::invalid_argument(fmt::format("unknown branch id {}", branch_id));
}

}  // namespace

json config_to_json(const AttackConfig& c) {
  return {{"tau", c.tau},
          {"alpha", c.alpha},
          {"xi", c.xi},
          {"rho", c.rho},
          {"subset", c.subset.to_string()},
          {"objective", c.objective == ObjectiveForm::directional ? "directional" : "verbatim"},
          {"manipulate_load", c.manipulate_load},
          {"manipulate_solar", c.manipulate_solar}};
}

AttackConfig config_from_json(const json& doc) {
  AttackConfig c;
  c.tau = doc.at("tau").get<double>();
  c.alpha = doc.at("alpha").get<double>();
  c.xi = doc.at("xi").get<double>();
  c.rho = doc.at("rho").get<double>();
  c.subset = SubsetStrategy::parse(doc.at("subset").get<std::string>());
  const auto obj = doc.at("objective").get<std::string>();
  if (obj != "directional" && obj != "verbatim") throw std::invalid_argument("objective must be directional or verbatim");
  c.objective = obj == "directional" ? ObjectiveForm::directional : ObjectiveForm::verbatim;
  c.manipulate_load = doc.value("manipulate_load", true);
  c.manipulate_solar = doc.value("manipulate_solar", true);
  c.validate();
  return c;
}

json attack_to_json(const AttackVector& v, const NetworkCase& network, const ShiftFactorModel& model) {
  const auto lids = load_ids(network);
  const auto sids = unit_ids(network, model.solar);
  json lines = json::array();
  for (std::size_t k = 0; k < v.targets.lines.size(); ++k) {
    const std::size_t l = v.targets.lines[k];
    const bool overload =
        std::find(v.targets.overload_lines.begin(), v.targets.overload_lines.end(), l) != v.targets.overload_lines.end();
    lines.push_back({{"branch", model.branch_ids.at(l)},
                     {"lambda", v.targets.lambda[k]},
                     {"loading", v.targets.loading[k]},
                     {"overload", overload},
                     {"f0", v.base_flows.at(l)},
                     {"f_max", v.flow_limits.at(l)},
                     {"delta_f", v.delta_f.at(k)}});
  }
  return {{"config", config_to_json(v.config)},
          {"objective", v.objective},
          {"delta_D", keyed("load", lids, v.delta_D)},
          {"delta_R", keyed("generator", sids, v.delta_R)},
          {"demand", keyed("load", lids, v.base_demand)},
          {"R0", keyed("generator", sids, v.base_R0)},
          {"target_lines", lines}};
}

AttackVector attack_from_json(const json& doc, const NetworkCase& network, const ShiftFactorModel& model) {
  const auto lids = load_ids(network);
  const auto sids = unit_ids(network, model.solar);
  AttackVector v = AttackVector::zero(lids.size(), sids.size(), model.line_count());
  v.config = config_from_json(doc.at("config"));
  v.objective = doc.at("objective").get<double>();
  v.delta_D = unkeyed(doc.at("delta_D"), "load", lids, "delta_D");
  v.delta_R = unkeyed(doc.at("delta_R"), "generator", sids, "delta_R");
  v.base_demand = unkeyed(doc.at("demand"), "load", lids, "demand");
  v.base_R0 = unkeyed(doc.at("R0"), "generator", sids, "R0");
  for (const auto& e : doc.at("target_lines")) {
    const std::size_t l = line_position(model, e.at("branch").get<int>());
    v.targets.lines.push_back(l);
    v.targets.lambda.push_back(e.at("lambda").get<int>());
    v.targets.loading.push_back(e.at("loading").get<double>());
    if (e.at("overload").get<bool>()) v.targets.overload_lines.push_back(l);
    v.base_flows[l] = e.at("f0").get<double>();
    v.flow_limits[l] = e.at("f_max").get<double>();
    v.delta_f.push_back(e.at("delta_f").get<double>());
  }
  return v;
}

json dispatch_to_json(const DispatchResult& r, const NetworkCase& network, const ShiftFactorModel& model) {
  json doc = {{"cost", r.cost},
              {"shed_total", r.shed_total},
              {"fingerprint", fmt::format("{:016x}", r.fingerprint)},
              {"P", keyed("generator", unit_ids(network, model.conventional), r.P)},
              {"R", keyed("generator", unit_ids(network, model.solar), r.R)},
              {"J", keyed("load", load_ids(network), r.J)},
              {"F", keyed("branch", model.branch_ids, r.F)}};
  doc["attack"] = r.attack ? attack_to_json(*r.attack, network, model) : json(nullptr);
  return doc;
}

DispatchResult dispatch_from_json(const json& doc, const NetworkCase& network, const ShiftFactorModel& model) {
  DispatchResult r;
  r.cost = doc.at("cost").get<double>();
  r.shed_total = doc.at("shed_total").get<double>();
  r.fingerprint = std::stoull(doc.at("fingerprint").get<std::string>(), nullptr, 16);
  r.P = unkeyed(doc.at("P"), "generator", unit_ids(network, model.conventional), "P");
  r.R = unkeyed(doc.at("R"), "generator", unit_ids(network, model.solar), "R");
  r.J = unkeyed(doc.at("J"), "load", load_ids(network), "J");
  r.F = unkeyed(doc.at("F"), "branch", model.branch_ids, "F");
  if (doc.contains("attack") && !doc.at("attack").is_null()) r.attack = attack_from_json(doc.at("attack"), network, model);
  return r;
}

}  // namespace solarlr
