#include "solarlr/ptdf.hpp"

#include <cmath>
#include <fstream>

#include <fmt/core.h>

namespace solarlr {

namespace {

constexpr double kSnapTolerance = 1e-12;

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

void require_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) throw std::invalid_argument(fmt::format("{} has {} entries, expected {}", what, v.size(), n));
}

}  // namespace

ShiftFactorModel build_shift_factors(const NetworkCase& network, std::optional<int> slack_bus) {
  ShiftFactorModel m;
  const auto nb = static_cast<Eigen::Index>(network.buses.size());
  const auto nl = static_cast<Eigen::Index>(network.branches.size());
  const auto ng = static_cast<Eigen::Index>(network.generators.size());
  const auto nd = static_cast<Eigen::Index>(network.loads.size());

  m.slack_bus = slack_bus.value_or(network.slack_bus());
  const auto slack = static_cast<Eigen::Index>(network.bus_index(m.slack_bus));
  for (const auto& b : network.buses) m.bus_ids.push_back(b.id);

  // Bus susceptance matrix and branch-bus flow matrix.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd Bf = Eigen::MatrixXd::Zero(nl, nb);
  for (Eigen::Index l = 0; l < nl; ++l) {
    const auto& br = network.branches[static_cast<std::size_t>(l)];
    const auto f = static_cast<Eigen::Index>(network.bus_index(br.from_bus));
    const auto t = static_cast<Eigen::Index>(network.bus_index(br.to_bus));
    const double y = 1.0 / br.reactance;
    B(f, f) += y;
    B(t, t) += y;
    B(f, t) -= y;
    B(t, f) -= y;
    Bf(l, f) = y;
    Bf(l, t) = -y;
    m.branch_ids.push_back(br.id);
    m.flow_limits.push_back(br.flow_limit);
  }

  // Reduced system without the slack row/column.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < nb; ++i) {
    if (i != slack) keep.push_back(i);
  }
  const auto nr = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd Bred(nr, nr);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) Bred(i, j) = B(keep[i], keep[j]);
  }
  Eigen::MatrixXd Xred = Eigen::MatrixXd::Zero(nr, nr);
  if (nr > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Bred);
    if (!lu.isInvertible()) {
      throw SingularNetworkError(
          fmt::format("reduced susceptance matrix is singular (rank {} of {})", lu.rank(), nr));
    }
    Xred = lu.inverse();
  }

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(nb, nb);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) X(keep[i], keep[j]) = Xred(i, j);
  }
  m.S = Bf * X;
  m.S = m.S.unaryExpr([](double v) { return std::abs(v) < kSnapTolerance ? 0.0 : v; });

  m.U = Eigen::MatrixXd::Zero(nb, ng);
  for (Eigen::Index g = 0; g < ng; ++g) {
    m.U(static_cast<Eigen::Index>(network.bus_index(network.generators[static_cast<std::size_t>(g)].bus)), g) = 1.0;
  }
  m.V = Eigen::MatrixXd::Zero(nb, nd);
  for (Eigen::Index d = 0; d < nd; ++d) {
    m.V(static_cast<Eigen::Index>(network.bus_index(network.loads[static_cast<std::size_t>(d)].bus)), d) = 1.0;
  }

  m.conventional = network.conventional_units();
  m.solar = network.solar_units();
  const Eigen::MatrixXd SU = m.S * m.U;
  m.SU_conventional.resize(nl, static_cast<Eigen::Index>(m.conventional.size()));
  for (std::size_t k = 0; k < m.conventional.size(); ++k) {
    m.SU_conventional.col(static_cast<Eigen::Index>(k)) = SU.col(static_cast<Eigen::Index>(m.conventional[k]));
  }
  m.SU_solar.resize(nl, static_cast<Eigen::Index>(m.solar.size()));
  for (std::size_t k = 0; k < m.solar.size(); ++k) {
    m.SU_solar.col(static_cast<Eigen::Index>(k)) = SU.col(static_cast<Eigen::Index>(m.solar[k]));
  }
  m.SV = m.S * m.V;
  return m;
}

Eigen::VectorXd compute_flows(const ShiftFactorModel& model, std::span<const double> P, std::span<const double> R,
                              std::span<const double> D, std::span<const double> J, std::span<const double> dR,
                              std::span<const double> dD) {
  require_size(P, model.conventional.size(), "P");
  require_size(R, model.solar.size(), "R");
  require_size(dR, model.solar.size(), "dR");
  require_size(D, model.load_count(), "D");
  require_size(J, model.load_count(), "J");
  require_size(dD, model.load_count(), "dD");
  Eigen::VectorXd solar = as_vector(R) + as_vector(dR);
  Eigen::VectorXd net_load = as_vector(D) + as_vector(dD) - as_vector(J);
  return model.SU_conventional * as_vector(P) + model.SU_solar * solar - model.SV * net_load;
}

Eigen::VectorXd flow_deviation(const ShiftFactorModel& model, std::span<const double> dR,
                               std::span<const double> dD) {
  require_size(dR, model.solar.size(), "dR");
  require_size(dD, model.load_count(), "dD");
  return model.SU_solar * as_vector(dR) - model.SV * as_vector(dD);
}

void write_shift_factor_csv(const ShiftFactorModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << "branch";
  for (int id : model.bus_ids) out << ",bus_" << id;
  out << '\n';
  for (Eigen::Index l = 0; l < model.S.rows(); ++l) {
    out << model.branch_ids[static_cast<std::size_t>(l)];
    for (Eigen::Index b = 0; b < model.S.cols(); ++b) out << ',' << fmt::format("{:.12g}", model.S(l, b));
    out << '\n';
  }
}

}  // namespace solarlr
