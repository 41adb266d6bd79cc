// JSON encoding of attack vectors and dispatch results. Per-element entries
// are keyed by case ids (load id, generator id, branch id), so the files can
// be read without knowing internal positions.
#pragma once

#include <json.hpp>

#include "solarlr/attack.hpp"
#include "solarlr/case_model.hpp"
#include "solarlr/ptdf.hpp"
#include "solarlr/sced.hpp"

namespace solarlr {

nlohmann::json attack_to_json(const AttackVector& vector, const NetworkCase& network, const ShiftFactorModel& model);
AttackVector attack_from_json(const nlohmann::json& doc, const NetworkCase& network, const ShiftFactorModel& model);

nlohmann::json dispatch_to_json(const DispatchResult& result, const NetworkCase& network,
                                const ShiftFactorModel& model);
DispatchResult dispatch_from_json(const nlohmann::json& doc, const NetworkCase& network,
                                  const ShiftFactorModel& model);

nlohmann::json config_to_json(const AttackConfig& config);
AttackConfig config_from_json(const nlohmann::json& doc);

}  // namespace solarlr
