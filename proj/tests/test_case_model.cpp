#include <doctest.h>

#include <cmath>

#include "solarlr/case_model.hpp"
#include "support.hpp"

using namespace solarlr;

namespace {

const char* kTwoBus = R"(function mpc = two_bus
mpc.version = '2';
mpc.baseMVA = 100;
%% bus data
mpc.bus = [
	1	3	0	0	0	0	1	1	0	135	1	1.06	0.94;
	2	1	50	10	0	0	1	1	0	135	1	1.06	0.94;
];
mpc.gen = [
	1	60	0	10	-10	1	100	1	80	5	0	0	0	0	0	0	0	0	0	0	0;
];
mpc.branch = [
	1	2	0.01	0.1	0	90	0	0	0	0	1	-360	360;
];
mpc.gencost = [
	2	0	0	3	0.5	12	0;
];
mpc.bus_name = {
	'Alpha';
	'Beta';
};
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal two-bus case") {
  auto c = parse_case(kTwoBus);
  REQUIRE(c.buses.size() == 2);
  REQUIRE(c.loads.size() == 1);
  CHECK(c.loads[0].bus == 2);
  CHECK(c.loads[0].demand == 50.0);
  CHECK(c.slack_bus() == 1);
  REQUIRE(c.branches.size() == 1);
  CHECK(c.branches[0].reactance == 0.1);
  CHECK(c.branches[0].flow_limit == 90.0);
  REQUIRE(c.generators.size() == 1);
  CHECK(c.generators[0].p_min == 5.0);
  CHECK(c.generators[0].p_max == 80.0);
  // secant: 12 + 0.5 * (5 + 80)
  CHECK(c.generators[0].marginal_cost == doctest::Approx(54.5));
  CHECK(c.loads[0].shed_cost == doctest::Approx(545.0));

  auto s = case_summary(c);
  CHECK(s.total_demand == 50.0);
  CHECK(s.solar_capacity == 0.0);
  CHECK(s.limited_branch_count == 1);
}

TEST_CASE("cost options") {
  CaseOptions linear;
  linear.linearization = CostLinearization::linear;
  linear.shed_cost = 999.0;
  auto c = parse_case(kTwoBus, linear);
  CHECK(c.generators[0].marginal_cost == 12.0);
  CHECK(c.loads[0].shed_cost == 999.0);

  auto pw = replace(kTwoBus, "2	0	0	3	0.5	12	0;", "1	0	0	2	0	0	100	1500;");
  CHECK(parse_case(pw).generators[0].marginal_cost == doctest::Approx(15.0));
}

TEST_CASE("comments, continuations and commas") {
  auto text = replace(kTwoBus, "	1	2	0.01	0.1	0	90	0	0	0	0	1	-360	360;",
                      "	1, 2, 0.01, 0.1, 0, ... split row\n 90, 0, 0, 0, 0, 1, -360, 360;  % trailing");
  auto c = parse_case(text);
  CHECK(c.branches[0].flow_limit == 90.0);
}

TEST_CASE("out-of-service rows are skipped") {
  auto text = replace(kTwoBus, "mpc.branch = [\n",
                      "mpc.branch = [\n	1	2	0.01	0.2	0	90	0	0	0	0	0	-360	360;\n");
  auto c = parse_case(text);
  REQUIRE(c.branches.size() == 1);
  CHECK(c.branches[0].id == 2);
}

TEST_CASE("syntax errors carry a position") {
  auto text = replace(kTwoBus, "0.01	0.1", "0.01	0.1x");
  try {
    parse_case(text);
    FAIL("expected a syntax error");
  } catch (const CaseSyntaxError& e) {
    CHECK(e.line() == 13);
    CHECK(e.column() > 1);
  }

  auto ragged = replace(kTwoBus, "2	1	50	10	0	0	1	1	0	135	1	1.06	0.94;", "2	1	50;");
  CHECK_THROWS_AS(parse_case(ragged), CaseSyntaxError);

  auto unterminated = replace(kTwoBus, "];\nmpc.gencost", "\nmpc.gencost");
  CHECK_THROWS_AS(parse_case(unterminated), CaseSyntaxError);

  CHECK_THROWS_AS(parse_case("mpc.bus = [1 3 0];"), CaseSyntaxError);
  CHECK_THROWS_AS(parse_case("x = 3;"), CaseSyntaxError);
}

TEST_CASE("semantic errors") {
  CHECK_THROWS_AS(parse_case(replace(kTwoBus, "	1	2	0.01", "	1	999	0.01")), CaseSemanticError);
  CHECK_THROWS_AS(parse_case(replace(kTwoBus, "0.01	0.1	0", "0.01	0	0")), CaseSemanticError);
  CHECK_THROWS_AS(parse_case(replace(kTwoBus, "	1	3	0", "	1	1	0")), CaseSemanticError);
  CHECK_THROWS_AS(parse_case(replace(kTwoBus, "	2	1	50", "	2	3	50")), CaseSemanticError);
  CHECK_THROWS_AS(parse_case(replace(kTwoBus, "100	1	80	5", "100	1	80	90")), CaseSemanticError);

  auto islanded = testing::make_case(3, {{1, 2, 0.1, 0}}, {{1, 0, 10, 1}}, {{2, 5}});
  CHECK_THROWS_AS(islanded.validate(), CaseSemanticError);
}

TEST_CASE("missing file names the path") {
  try {
    load_case_file("/nonexistent/case.m");
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("/nonexistent/case.m") != std::string::npos);
  }
}

TEST_CASE("bundled 118-bus case") {
  auto c = load_case_file(testing::data_path("case118.m"));
  auto s = case_summary(c);
  CHECK(s.bus_count == 118);
  CHECK(s.load_count == 99);
  CHECK(s.generator_count == 54);
  CHECK(s.branch_count == 186);
  CHECK(s.limited_branch_count == 186);
  CHECK(std::abs(s.total_demand - 4242.0) < 1e-9);
  CHECK(std::llround(s.total_capacity) == 9966);
  CHECK(c.slack_bus() == 69);

  auto ids = load_solar_selection_file(testing::data_path("solar_ids_118.txt"));
  CHECK(ids == default_solar_selection(c, 35, 3500.0));
  auto solar = designate_solar(c, ids);
  auto ss = case_summary(solar);
  CHECK(ss.solar_count == 35);
  CHECK(ss.solar_capacity == doctest::Approx(3500.0));
  CHECK(ss.total_capacity == doctest::Approx(s.total_capacity));
}

TEST_CASE("solar designation") {
  auto c = testing::make_case(2, {{1, 2, 0.1, 0}}, {{1, 0, 10, 1}, {2, 0, 20, 2}, {2, 0, 30, 3}}, {{2, 5}});
  CHECK(designate_solar(c, {}).solar_units().empty());

  auto all = designate_solar(c, {1, 2, 3});
  CHECK(all.solar_units().size() == 3);
  CHECK(all.conventional_units().empty());
  CHECK(all.generators[2].rated_capacity == 30.0);

  CHECK_THROWS_AS(designate_solar(c, {4}), std::invalid_argument);
  CHECK_THROWS_AS(designate_solar(c, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(default_solar_selection(c, 2, 20.0), std::invalid_argument);
}

TEST_CASE("solar selection text") {
  CHECK(parse_solar_selection("# header\n3\n\n 7  # trailing\n1\n") == std::vector<int>{3, 7, 1});
  CHECK_THROWS(parse_solar_selection("3\nseven\n"));
}

TEST_CASE("fingerprint tracks content") {
  auto a = parse_case(kTwoBus);
  auto b = parse_case(kTwoBus);
  CHECK(case_fingerprint(a) == case_fingerprint(b));
  b.loads[0].demand += 1.0;
  CHECK(case_fingerprint(a) != case_fingerprint(b));
  CHECK(case_fingerprint(a) != case_fingerprint(designate_solar(a, {1})));
}
