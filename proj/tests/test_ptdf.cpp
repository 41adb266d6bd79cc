#include <doctest.h>

#include <random>

#include "solarlr/ptdf.hpp"
#include "support.hpp"

using namespace solarlr;

TEST_CASE("three-bus ring splits 2/3 and 1/3") {
  auto c = testing::ring3();
  auto m = build_shift_factors(c);
  // Inject at bus 2, withdraw at bus 1: line 1-2 carries -2/3, the detour
  // 1-3-2 carries 1/3 the other way on both of its lines.
  CHECK(std::abs(m.S(0, 1) + 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(m.S(1, 1) + 1.0 / 3.0) < 1e-9);
  CHECK(std::abs(m.S(2, 1) + 1.0 / 3.0) < 1e-9);
  CHECK(m.S.col(0).isZero());
}

TEST_CASE("radial two-bus line") {
  auto c = testing::make_case(2, {{1, 2, 0.2, 0}}, {{1, 0, 100, 1}}, {{2, 50}});
  auto m = build_shift_factors(c);
  CHECK(m.S(0, 0) == 0.0);
  CHECK(m.S(0, 1) == doctest::Approx(-1.0));

  std::vector<double> P{50}, R, D{50}, J{0}, dR, dD{0};
  auto f = compute_flows(m, P, R, D, J, dR, dD);
  CHECK(f(0) == doctest::Approx(50.0));

  std::vector<double> zero{0};
  CHECK(compute_flows(m, zero, R, zero, zero, dR, zero).isZero());
}

TEST_CASE("moving load across a line shows up in full") {
  auto c = testing::make_case(2, {{1, 2, 0.2, 0}}, {{1, 0, 100, 1}}, {{1, 20}, {2, 50}});
  auto m = build_shift_factors(c);
  std::vector<double> dR, dD{10, -10};
  CHECK(std::abs(flow_deviation(m, dR, dD)(0)) == doctest::Approx(10.0));
  std::vector<double> none{0, 0};
  CHECK(flow_deviation(m, dR, none).isZero());
}

TEST_CASE("superposition") {
  auto c = load_case_file(testing::data_path("case118.m"));
  c = designate_solar(c, load_solar_selection_file(testing::data_path("solar_ids_118.txt")));
  auto m = build_shift_factors(c);
  std::mt19937 rng(3);
  std::normal_distribution<double> n(0.0, 5.0);
  auto draw = [&](std::size_t k) {
    std::vector<double> v(k);
    for (auto& x : v) x = n(rng);
    return v;
  };
  auto r1 = draw(35), r2 = draw(35), d1 = draw(99), d2 = draw(99);
  std::vector<double> rs(35), ds(99);
  for (std::size_t i = 0; i < 35; ++i) rs[i] = r1[i] + r2[i];
  for (std::size_t i = 0; i < 99; ++i) ds[i] = d1[i] + d2[i];
  Eigen::VectorXd lhs = flow_deviation(m, rs, ds);
  Eigen::VectorXd rhs = flow_deviation(m, r1, d1) + flow_deviation(m, r2, d2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("118-bus flows match an angle-based solve") {
  auto c = load_case_file(testing::data_path("case118.m"));
  auto m = build_shift_factors(c);
  // Conventional units share the demand in proportion to p_max.
  double cap = 0, demand = 0;
  for (const auto& g : c.generators) cap += g.p_max;
  for (const auto& l : c.loads) demand += l.demand;
  std::vector<double> P;
  for (const auto& g : c.generators) P.push_back(g.p_max * demand / cap);
  std::vector<double> D = c.demand_vector(), J(D.size(), 0.0), none(D.size(), 0.0), R, dR;
  auto f = compute_flows(m, P, R, D, J, dR, none);

  Eigen::VectorXd inj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.buses.size()));
  for (std::size_t g = 0; g < c.generators.size(); ++g) inj(static_cast<Eigen::Index>(c.bus_index(c.generators[g].bus))) += P[g];
  for (const auto& l : c.loads) inj(static_cast<Eigen::Index>(c.bus_index(l.bus))) -= l.demand;
  auto oracle = testing::angle_flows(c, inj);
  CHECK((f - oracle).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("balanced injections do not depend on the slack") {
  auto c = load_case_file(testing::data_path("case118.m"));
  auto a = build_shift_factors(c);
  auto b = build_shift_factors(c, 10);
  CHECK(b.slack_bus == 10);
  CHECK(b.S.col(static_cast<Eigen::Index>(c.bus_index(10))).isZero());
  Eigen::VectorXd inj = Eigen::VectorXd::Zero(a.S.cols());
  inj(3) = 40;
  inj(50) = -25;
  inj(100) = -15;
  CHECK((a.S * inj - b.S * inj).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("islanded network is singular") {
  auto c = testing::make_case(3, {{1, 2, 0.1, 0}}, {{1, 0, 10, 1}}, {{2, 5}});
  CHECK_THROWS_AS(build_shift_factors(c), SingularNetworkError);
}

TEST_CASE("size checks") {
  auto m = build_shift_factors(testing::ring3());
  std::vector<double> two{0, 0}, one{0}, none;
  CHECK_THROWS_AS(compute_flows(m, one, none, two, two, none, two), std::invalid_argument);
  CHECK_THROWS_AS(flow_deviation(m, one, two), std::invalid_argument);
}
