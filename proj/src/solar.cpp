#include "solarlr/solar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/core.h>

namespace solarlr {

void SolarParams::validate() const {
  if (!(rated_capacity >= 0.0)) throw std::invalid_argument("solar rated capacity must be >= 0");
  if (!(standard_irradiance > 0.0)) throw std::invalid_argument("standard irradiance must be > 0");
  if (!(irradiance_point > 0.0)) throw std::invalid_argument("irradiance point must be > 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("irradiance scaling factor must be >= 0");
}

double power_output(const SolarParams& params, double irradiance) {
  if (!(irradiance >= 0.0)) throw std::invalid_argument(fmt::format("irradiance {} is negative", irradiance));
  const double I = params.kappa * irradiance;
  if (I <= 0.0) return 0.0;
  if (I < params.irradiance_point) {
    return params.rated_capacity * I * I / (params.standard_irradiance * params.irradiance_point);
  }
  return params.rated_capacity;
}

std::string_view to_string(TimeOfDay t) {
  switch (t) {
    case TimeOfDay::morning:
      return "morning";
    case TimeOfDay::afternoon:
      return "afternoon";
    case TimeOfDay::evening:
      return "evening";
    case TimeOfDay::night:
      return "night";
  }
  return "?";
}

TimeOfDay parse_time_of_day(std::string_view s) {
  for (auto t : kTimesOfDay) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument(fmt::format("unknown time of day '{}'", s));
}

std::string IrradianceProfile::label() const { return fmt::format("{}-{}", month, to_string(time)); }

double IrradianceProfile::irradiance_for(int generator_id) const {
  auto it = unit_irradiance.find(generator_id);
  return it == unit_irradiance.end() ? irradiance : it->second;
}

const IrradianceProfile& ScenarioMatrix::find(std::string_view label) const {
  for (const auto& p : profiles) {
    if (p.label() == label) return p;
  }
  throw std::invalid_argument(fmt::format("no scenario '{}'", label));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& s, int lineno) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw IrradianceFormatError(fmt::format("line {}: '{}' is not a number", lineno, s));
  }
  return v;
}

}  // namespace

ScenarioMatrix load_irradiance_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  bool has_unit_column = false;

  std::vector<std::string> months;
  std::map<std::pair<std::string, TimeOfDay>, IrradianceProfile> cells;
  std::map<std::pair<std::string, TimeOfDay>, std::map<int, double>> overrides;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells_in_row = split_csv(line);
    if (!header_seen) {
      if (cells_in_row.size() < 3 || cells_in_row[0] != "month" || cells_in_row[1] != "time" ||
          cells_in_row[2] != "irradiance_wm2" || (cells_in_row.size() == 4 && cells_in_row[3] != "unit_id") ||
          cells_in_row.size() > 4) {
        throw IrradianceFormatError(
            fmt::format("line {}: header must be month,time,irradiance_wm2[,unit_id]", lineno));
      }
      has_unit_column = cells_in_row.size() == 4;
      header_seen = true;
      continue;
    }
    const std::size_t expected = has_unit_column ? 4 : 3;
    if (cells_in_row.size() != expected && !(has_unit_column && cells_in_row.size() == 3)) {
      throw IrradianceFormatError(
          fmt::format("line {}: expected {} fields, found {}", lineno, expected, cells_in_row.size()));
    }
    const std::string& month = cells_in_row[0];
    if (month.empty()) throw IrradianceFormatError(fmt::format("line {}: empty month", lineno));
    TimeOfDay time{};
    try {
      time = parse_time_of_day(cells_in_row[1]);
    } catch (const std::invalid_argument& e) {
      throw IrradianceFormatError(fmt::format("line {}: {}", lineno, e.what()));
    }
    const double value = parse_number(cells_in_row[2], lineno);
    if (value < 0.0) {
      throw IrradianceFormatError(fmt::format("line {}: irradiance {} is negative", lineno, value));
    }
    if (time == TimeOfDay::night && value != 0.0) {
      throw IrradianceFormatError(fmt::format("line {}: night irradiance must be 0, found {}", lineno, value));
    }
    if (std::find(months.begin(), months.end(), month) == months.end()) months.push_back(month);
    const auto key = std::make_pair(month, time);

    const bool per_unit = cells_in_row.size() == 4 && !cells_in_row[3].empty();
    if (per_unit) {
      const double unit = parse_number(cells_in_row[3], lineno);
      if (unit != std::floor(unit)) throw IrradianceFormatError(fmt::format("line {}: bad unit id", lineno));
      if (!overrides[key].emplace(static_cast<int>(unit), value).second) {
        throw IrradianceFormatError(fmt::format("line {}: duplicate unit row", lineno));
      }
    } else {
      IrradianceProfile p;
      p.month = month;
      p.time = time;
      p.irradiance = value;
      if (!cells.emplace(key, p).second) {
        throw IrradianceFormatError(fmt::format("line {}: duplicate scenario {}-{}", lineno, month, to_string(time)));
      }
    }
  }
  if (!header_seen) throw IrradianceFormatError("irradiance file is empty");
  if (months.size() != 4) {
    throw IrradianceFormatError(fmt::format("expected 4 months, found {}", months.size()));
  }

  ScenarioMatrix matrix;
  for (const auto& month : months) {
    for (auto t : kTimesOfDay) {
      auto it = cells.find({month, t});
      if (it == cells.end()) {
        throw IrradianceFormatError(fmt::format("missing scenario {}-{}", month, to_string(t)));
      }
      IrradianceProfile p = it->second;
      if (auto o = overrides.find({month, t}); o != overrides.end()) p.unit_irradiance = o->second;
      matrix.profiles.push_back(std::move(p));
    }
  }
  return matrix;
}

ScenarioMatrix load_irradiance_file(const std::string& path) {
  try {
    return load_irradiance_csv(read_text_file(path));
  } catch (const IrradianceFormatError& e) {
    throw IrradianceFormatError(fmt::format("{}: {}", path, e.what()));
  }
}

double SolarFleet::rated_total() const {
  double total = 0.0;
  for (const auto& u : units) total += u.params.rated_capacity;
  return total;
}

SolarFleet make_fleet(const NetworkCase& network, const SolarParams& shared) {
  SolarFleet fleet;
  for (auto idx : network.solar_units()) {
    const auto& g = network.generators[idx];
    SolarUnit unit;
    unit.generator_id = g.id;
    unit.params = shared;
    unit.params.rated_capacity = g.rated_capacity;
    unit.params.validate();
    fleet.units.push_back(unit);
  }
  return fleet;
}

std::vector<double> fleet_output(const SolarFleet& fleet, const IrradianceProfile& profile) {
  std::vector<double> out;
  out.reserve(fleet.units.size());
  for (const auto& u : fleet.units) out.push_back(power_output(u.params, profile.irradiance_for(u.generator_id)));
  return out;
}

}  // namespace solarlr
