// Irradiance-to-power model for solar units and the day/season scenario set.
#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "solarlr/case_model.hpp"

namespace solarlr {

/// Output model parameters for one unit.
///
/// The quadratic branch ends at s_r*S_c/I_s when I reaches S_c, then jumps to
/// s_r. With the defaults that is a step from 0.2*s_r to s_r at 200 W/m^2.
struct SolarParams {
  double rated_capacity = 0.0;           // s^r, MW
  double standard_irradiance = 1000.0;   // I_s, W/m^2
  double irradiance_point = 200.0;       // S_c, W/m^2
  double kappa = 1.0;                    // multiplies incoming irradiance

  void validate() const;
};

/// R0 = s_r * I^2 / (I_s * S_c) for 0 < I < S_c, s_r for I >= S_c, with
/// I = kappa * irradiance. Negative irradiance throws std::invalid_argument.
double power_output(const SolarParams& params, double irradiance);

enum class TimeOfDay { morning, afternoon, evening, night };

inline constexpr std::array<TimeOfDay, 4> kTimesOfDay = {TimeOfDay::morning, TimeOfDay::afternoon,
                                                         TimeOfDay::evening, TimeOfDay::night};

std::string_view to_string(TimeOfDay t);
TimeOfDay parse_time_of_day(std::string_view s);

struct IrradianceProfile {
  std::string month;
  TimeOfDay time = TimeOfDay::morning;
  double irradiance = 0.0;                    // W/m^2, system-wide
  std::map<int, double> unit_irradiance;      // generator id -> W/m^2 override

  std::string label() const;
  double irradiance_for(int generator_id) const;
};

/// Sixteen profiles: months in first-appearance order, times in
/// morning/afternoon/evening/night order within each month.
struct ScenarioMatrix {
  std::vector<IrradianceProfile> profiles;

  const IrradianceProfile& find(std::string_view label) const;
};

class IrradianceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header `month,time,irradiance_wm2[,unit_id]`. Rows without a unit id set
/// the system-wide value of their cell; rows with one override that unit.
ScenarioMatrix load_irradiance_csv(std::string_view text);
ScenarioMatrix load_irradiance_file(const std::string& path);

struct SolarUnit {
  int generator_id = 0;
  SolarParams params;
};

struct SolarFleet {
  std::vector<SolarUnit> units;  // same order as NetworkCase::solar_units()

  double rated_total() const;
};

/// Fleet in case order with s_r taken from each unit's rated capacity and
/// the shared I_s, S_c and kappa of `shared`.
SolarFleet make_fleet(const NetworkCase& network, const SolarParams& shared = {});

std::vector<double> fleet_output(const SolarFleet& fleet, const IrradianceProfile& profile);

}  // namespace solarlr
