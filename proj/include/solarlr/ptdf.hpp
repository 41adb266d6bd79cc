// DC shift factors and line-flow superposition.
//
// Orientation: a positive flow runs from_bus -> to_bus. Injections are
// positive for generation, so S(l, b) is the flow on line l per MW injected
// at bus b and withdrawn at the slack bus.
#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solarlr/case_model.hpp"

namespace solarlr {

class SingularNetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// S (lines x buses), U (buses x generators), V (buses x loads) plus the
/// conventional/solar partition captured when the model was built. S*U and
/// S*V are cached per partition because every flow evaluation uses them.
struct ShiftFactorModel {
  Eigen::MatrixXd S;
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
  int slack_bus = 0;

  std::vector<int> bus_ids;
  std::vector<int> branch_ids;
  std::vector<double> flow_limits;
  std::vector<std::size_t> conventional;  // positions into case.generators
  std::vector<std::size_t> solar;

  Eigen::MatrixXd SU_conventional;  // lines x conventional units
  Eigen::MatrixXd SU_solar;         // lines x solar units
  Eigen::MatrixXd SV;               // lines x loads

  std::size_t line_count() const { return static_cast<std::size_t>(S.rows()); }
  std::size_t bus_count() const { return static_cast<std::size_t>(S.cols()); }
  std::size_t load_count() const { return static_cast<std::size_t>(V.cols()); }
};

/// Builds the model for `network` as partitioned at call time. Uses the
/// case's reference bus unless `slack_bus` is given.
ShiftFactorModel build_shift_factors(const NetworkCase& network, std::optional<int> slack_bus = std::nullopt);

/// F = S*U*(P + R + dR) - S*V*(D + dD - J). P is per conventional unit,
/// R and dR per solar unit, D, J and dD per load.
Eigen::VectorXd compute_flows(const ShiftFactorModel& model, std::span<const double> P, std::span<const double> R,
                              std::span<const double> D, std::span<const double> J, std::span<const double> dR,
                              std::span<const double> dD);

/// df = S*U*dR - S*V*dD.
Eigen::VectorXd flow_deviation(const ShiftFactorModel& model, std::span<const double> dR,
                               std::span<const double> dD);

/// Debug dump of S with bus ids as the header row.
void write_shift_factor_csv(const ShiftFactorModel& model, const std::string& path);

}  // namespace solarlr
