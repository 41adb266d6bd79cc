// Small hand-built cases and independent oracles shared by the tests.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solarlr/case_model.hpp"
#include "solarlr/harness.hpp"
#include "solarlr/lp.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(SOLARLR_DATA_DIR) + "/" + name; }

inline solarlr::RunConfig bundled_config() {
  solarlr::RunConfig c;
  c.case_path = data_path("case118.m");
  c.solar_ids_path = data_path("solar_ids_118.txt");
  c.irradiance_path = data_path("irradiance_sample.csv");
  return c;
}

/// Parsed bundled inputs, built once per test binary.
inline const solarlr::Pipeline& bundled() {
  static const solarlr::Pipeline p = solarlr::load_pipeline(bundled_config());
  return p;
}

struct LineSpec {
  int from, to;
  double x, limit;
};
struct GenSpec {
  int bus;
  double p_min, p_max, cost;
};
struct LoadSpec {
  int bus;
  double demand;
};

/// Buses 1..n with bus 1 as slack unless `slack` says otherwise. Ids are
/// 1-based positions, as the parser assigns them.
inline solarlr::NetworkCase make_case(int buses, const std::vector<LineSpec>& lines, const std::vector<GenSpec>& gens,
                                      const std::vector<LoadSpec>& loads, double shed_cost = 1000.0, int slack = 1) {
  solarlr::NetworkCase c;
  for (int b = 1; b <= buses; ++b) c.buses.push_back({b, b == slack});
  for (std::size_t i = 0; i < lines.size(); ++i) {
    c.branches.push_back({static_cast<int>(i) + 1, lines[i].from, lines[i].to, lines[i].x, lines[i].limit});
  }
  for (std::size_t i = 0; i < gens.size(); ++i) {
    solarlr::Generator g;
    g.id = static_cast<int>(i) + 1;
    g.bus = gens[i].bus;
    g.p_min = gens[i].p_min;
    g.p_max = gens[i].p_max;
    g.marginal_cost = gens[i].cost;
    c.generators.push_back(g);
  }
  for (std::size_t i = 0; i < loads.size(); ++i) {
    c.loads.push_back({static_cast<int>(i) + 1, loads[i].bus, loads[i].demand, shed_cost});
  }
  return c;
}

/// 3-bus ring with equal reactances, slack at bus 1.
inline solarlr::NetworkCase ring3(double limit = 0.0) {
  return make_case(3, {{1, 2, 0.1, limit}, {1, 3, 0.1, limit}, {3, 2, 0.1, limit}}, {{1, 0, 200, 10}, {3, 0, 100, 20}},
                   {{2, 90}, {3, 30}});
}

/// DC flows from a direct angle solve: B_red * theta = p with theta_slack = 0,
/// then (theta_f - theta_t) / x per branch. `injection` is per bus position.
inline Eigen::VectorXd angle_flows(const solarlr::NetworkCase& c, const Eigen::VectorXd& injection) {
  const auto n = static_cast<Eigen::Index>(c.buses.size());
  const auto slack = static_cast<Eigen::Index>(c.bus_index(c.slack_bus()));
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (const auto& br : c.branches) {
    const auto f = static_cast<Eigen::Index>(c.bus_index(br.from_bus));
    const auto t = static_cast<Eigen::Index>(c.bus_index(br.to_bus));
    B(f, f) += 1.0 / br.reactance;
    B(t, t) += 1.0 / br.reactance;
    B(f, t) -= 1.0 / br.reactance;
    B(t, f) -= 1.0 / br.reactance;
  }
  // Pin the slack angle with an identity row instead of deleting it.
  B.row(slack).setZero();
  B.col(slack).setZero();
  B(slack, slack) = 1.0;
  Eigen::VectorXd p = injection;
  p(slack) = 0.0;
  const Eigen::VectorXd theta = B.ldlt().solve(p);
  Eigen::VectorXd flows(static_cast<Eigen::Index>(c.branches.size()));
  for (std::size_t l = 0; l < c.branches.size(); ++l) {
    const auto& br = c.branches[l];
    flows(static_cast<Eigen::Index>(l)) =
        (theta(static_cast<Eigen::Index>(c.bus_index(br.from_bus))) -
         theta(static_cast<Eigen::Index>(c.bus_index(br.to_bus)))) /
        br.reactance;
  }
  return flows;
}

/// Best objective over every basic solution of an LP whose variables all
/// have finite bounds. Returns false when no vertex is feasible.
inline bool enumerate_vertices(const solarlr::LinearProgram& lp, double& best, double tol = 1e-7) {
  const std::size_t n = lp.variable_count();
  const auto& vars = lp.variables();
  struct Row {
    Eigen::VectorXd a;
    double b;
  };
  // Equality rows are enforced by the feasibility check; in the basis they
  // compete like any other row so redundant ones cannot make it singular.
  std::vector<Row> rows;
  for (const auto& c : lp.constraints()) {
    Row r{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), c.rhs};
    for (const auto& t : c.terms) r.a(static_cast<Eigen::Index>(t.var)) += t.coef;
    rows.push_back(r);
  }
  const bool maximize = lp.sense() == solarlr::Sense::maximize;
  bool found = false;

  // Each variable sits at its lower bound, its upper bound, or is left free;
  // the free ones are pinned by a subset of the rows of matching size.
  std::vector<int> state(n, 0);  // 0 free, 1 lower, 2 upper
  std::vector<std::size_t> chosen;
  auto solve_leaf = [&](const std::vector<std::size_t>& free) {
    const auto k = static_cast<Eigen::Index>(free.size());
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      if (state[j] == 1) x(static_cast<Eigen::Index>(j)) = vars[j].lower;
      if (state[j] == 2) x(static_cast<Eigen::Index>(j)) = vars[j].upper;
      if (state[j] == 0) x(static_cast<Eigen::Index>(j)) = 0.0;
    }
    if (k > 0) {
      Eigen::MatrixXd A(k, k);
      Eigen::VectorXd b(k);
      Eigen::Index r = 0;
      auto put = [&](const Row& row) {
        for (Eigen::Index c = 0; c < k; ++c) A(r, c) = row.a(static_cast<Eigen::Index>(free[static_cast<std::size_t>(c)]));
        b(r++) = row.b - row.a.dot(x);
      };
      for (auto i : chosen) put(rows[i]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd y = lu.solve(b);
      for (Eigen::Index c = 0; c < k; ++c) x(static_cast<Eigen::Index>(free[static_cast<std::size_t>(c)])) = y(c);
    }
    std::vector<double> xs(x.data(), x.data() + x.size());
    if (solarlr::check_feasibility(lp, xs).max_violation() > tol) return;
    const double z = lp.objective_value(xs);
    if (!found || (maximize ? z > best : z < best)) best = z;
    found = true;
  };
  auto choose_rows = [&](auto&& self, std::size_t from, std::size_t left, const std::vector<std::size_t>& free) -> void {
    if (left == 0) {
      solve_leaf(free);
      return;
    }
    for (std::size_t i = from; i + left <= rows.size(); ++i) {
      chosen.push_back(i);
      self(self, i + 1, left - 1, free);
      chosen.pop_back();
    }
  };
  auto assign = [&](auto&& self, std::size_t j) -> void {
    if (j == n) {
      std::vector<std::size_t> free;
      for (std::size_t v = 0; v < n; ++v) {
        if (state[v] == 0) free.push_back(v);
      }
      if (free.size() > rows.size()) return;
      choose_rows(choose_rows, 0, free.size(), free);
      return;
    }
    for (int s = 0; s < 3; ++s) {
      if (s == 1 && !std::isfinite(vars[j].lower)) continue;
      if (s == 2 && (!std::isfinite(vars[j].upper) || vars[j].upper == vars[j].lower)) continue;
      state[j] = s;
      self(self, j + 1);
    }
  };
  assign(assign, 0);
  return found;
}

/// Random LP with finite boxes (some negative, some zero-width) and a mix of
/// <=, >= and = rows built around a point inside the box, so it is feasible.
inline solarlr::LinearProgram random_lp(std::mt19937& rng, std::size_t n, std::size_t m) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0), width(0.0, 8.0), unit(0.0, 1.0);
  solarlr::LinearProgram lp;
  lp.set_sense(unit(rng) < 0.5 ? solarlr::Sense::minimize : solarlr::Sense::maximize);
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = std::round(coef(rng));
    const double hi = unit(rng) < 0.1 ? lo : lo + std::round(width(rng) * 4.0) / 4.0;
    lp.add_variable("x" + std::to_string(j), lo, hi, std::round(coef(rng) * 4.0) / 4.0);
    x0[j] = lo + unit(rng) * (hi - lo);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<solarlr::Term> terms;
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (unit(rng) < 0.3) continue;
      const double a = std::round(coef(rng) * 2.0) / 2.0;
      terms.push_back({j, a});
      ax += a * x0[j];
    }
    const double pick = unit(rng);
    if (pick < 0.15) {
      lp.add_constraint("e" + std::to_string(i), std::move(terms), solarlr::Relation::equal, ax);
    } else if (pick < 0.6) {
      lp.add_constraint("l" + std::to_string(i), std::move(terms), solarlr::Relation::less_equal, ax + 2.0 * unit(rng));
    } else {
      lp.add_constraint("g" + std::to_string(i), std::move(terms), solarlr::Relation::greater_equal,
                        ax - 2.0 * unit(rng));
    }
  }
  return lp;
}

}  // namespace testing
