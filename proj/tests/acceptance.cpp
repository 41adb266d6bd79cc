// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <sys/wait.h>

#include <fmt/core.h>

#include "solarlr/report.hpp"
#include "support.hpp"

using namespace solarlr;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, const std::string& title, double limit_s, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, fmt::format("exception: {}", e.what())};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0.0 && s >= limit_s) {
    v.pass = false;
    v.detail += fmt::format("; over the {:.0f} s budget", limit_s);
  }
  if (!v.pass) ++failures;
  fmt::print("{} criterion {}: {} ({}) [{:.3f} s]\n", v.pass ? "PASS" : "FAIL", n, title, v.detail, s);
  std::fflush(stdout);
}

const Pipeline& pipeline() {
  static const Pipeline p = load_pipeline(testing::bundled_config());
  return p;
}

// Filled by criterion 3, reused by 8 and 9.
const std::vector<ScenarioResult>* matrix_rows = nullptr;

double flow_at(const Eigen::VectorXd& v, std::size_t l) { return v(static_cast<Eigen::Index>(l)); }

struct DispatchCheck {
  double balance = 0.0;
  double box = 0.0;
  double limit = 0.0;
};

DispatchCheck check_dispatch(const Pipeline& p, const DispatchResult& d, std::span<const double> R0,
                             const AttackVector* attack) {
  DispatchCheck c;
  double supply = 0.0;
  for (std::size_t k = 0; k < d.P.size(); ++k) {
    const auto& g = p.network.generators[p.model.conventional[k]];
    c.box = std::max({c.box, g.p_min - d.P[k], d.P[k] - g.p_max});
    supply += d.P[k];
  }
  for (std::size_t k = 0; k < d.R.size(); ++k) {
    c.box = std::max({c.box, -d.R[k], d.R[k] - R0[k]});
    supply += d.R[k];
  }
  double demand = 0.0;
  for (std::size_t i = 0; i < d.J.size(); ++i) {
    const double seen = p.network.loads[i].demand + (attack ? attack->delta_D[i] : 0.0);
    c.box = std::max({c.box, -d.J[i], d.J[i] - std::max(0.0, seen)});
    supply += d.J[i];
    demand += p.network.loads[i].demand;
  }
  c.balance = std::abs(supply - demand);
  for (std::size_t l = 0; l < d.F.size(); ++l) {
    if (p.model.flow_limits[l] > 0.0) c.limit = std::max(c.limit, std::abs(d.F[l]) - p.model.flow_limits[l]);
  }
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SOLARLR_CLI) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  criterion(1, "118-bus case fidelity", 1.0, [] {
    const auto c = load_case_file(testing::data_path("case118.m"));
    const auto s = case_summary(c);
    const bool ok = s.bus_count == 118 && s.load_count == 99 && s.generator_count == 54 &&
                    std::abs(s.total_demand - 4242.0) < 1e-9 && std::llround(s.total_capacity) == 9966;
    return Verdict{ok, fmt::format("buses {}, loads {}, generators {}, demand {:.6f} MW, capacity {:.2f} MW",
                                   s.bus_count, s.load_count, s.generator_count, s.total_demand, s.total_capacity)};
  });

  criterion(2, "shift factors against analytic and angle-based flows", 5.0, [] {
    // Ring: 90 MW withdrawn at bus 2, supplied at bus 1.
    const auto ring = testing::ring3();
    const auto m = build_shift_factors(ring);
    std::vector<double> P{90, 0}, R, D{90, 0}, J{0, 0}, dR, dD{0, 0};
    const auto f = compute_flows(m, P, R, D, J, dR, dD);
    const double ring_err = std::max({std::abs(flow_at(f, 0) - 60.0), std::abs(flow_at(f, 1) - 30.0),
                                      std::abs(flow_at(f, 2) - 30.0)});

    const auto c = load_case_file(testing::data_path("case118.m"));
    const auto big = build_shift_factors(c);
    double cap = 0, demand = 0;
    for (const auto& g : c.generators) cap += g.p_max;
    for (const auto& l : c.loads) demand += l.demand;
    std::vector<double> Pg;
    for (const auto& g : c.generators) Pg.push_back(g.p_max * demand / cap);
    const auto Dv = c.demand_vector();
    std::vector<double> zero(Dv.size(), 0.0), none;
    const auto fb = compute_flows(big, Pg, none, Dv, zero, none, zero);
    Eigen::VectorXd inj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.buses.size()));
    for (std::size_t g = 0; g < c.generators.size(); ++g) {
      inj(static_cast<Eigen::Index>(c.bus_index(c.generators[g].bus))) += Pg[g];
    }
    for (const auto& l : c.loads) inj(static_cast<Eigen::Index>(c.bus_index(l.bus))) -= l.demand;
    const double big_err = (fb - testing::angle_flows(c, inj)).cwiseAbs().maxCoeff();
    return Verdict{ring_err <= 1e-9 && big_err <= 1e-6,
                   fmt::format("ring max error {:.2e}, 118-bus max error {:.2e} MW", ring_err, big_err)};
  });

  criterion(3, "attack physics on every feasible scenario", 60.0, [] {
    static const auto rows = run_matrix(pipeline(), AttackConfig{}, 1);
    matrix_rows = &rows;
    const auto& m = pipeline().model;
    std::size_t feasible = 0;
    double sums = 0.0, bounds = 0.0, flow = 0.0, margin = kInfinity;
    for (const auto& r : rows) {
      if (!r.attack_feasible()) continue;
      ++feasible;
      const auto& v = *r.attack.vector;
      const auto rep = verify_consistency(v, m);
      sums = std::max({sums, rep.load_sum_residual, rep.solar_sum_residual});
      bounds = std::max({bounds, rep.load_bound_excess, rep.solar_bound_excess});
      flow = std::max(flow, rep.max_flow_residual());
      for (double x : rep.overload_margin) margin = std::min(margin, x);
    }
    const bool ok = feasible > 0 && sums <= 1e-6 && bounds <= 1e-9 && flow <= 1e-6 && margin >= -1e-6;
    return Verdict{ok, fmt::format("{} of {} feasible; sum residual {:.2e}, bound excess {:.2e}, flow residual "
                                   "{:.2e}, worst overload margin {:.6f} MW",
                                   feasible, rows.size(), sums, bounds, flow, margin)};
  });

  criterion(4, "simplex against vertex enumeration on 25 random LPs", 10.0, [] {
    std::mt19937 rng(2024);
    double worst = 0.0;
    int mismatched = 0;
    for (int t = 0; t < 25; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 9);
      const std::size_t rows = 1 + static_cast<std::size_t>(t % 5);
      const auto lp = testing::random_lp(rng, n, rows);
      double best = 0.0;
      if (!testing::enumerate_vertices(lp, best)) {
        ++mismatched;
        continue;
      }
      const auto sol = solve(lp);
      if (sol.status != SolveStatus::optimal) {
        ++mismatched;
        continue;
      }
      const double rel = std::abs(sol.objective - best) / std::max(1.0, std::abs(best));
      worst = std::max(worst, rel);
      if (rel > 1e-8) ++mismatched;
    }
    return Verdict{mismatched == 0, fmt::format("{} mismatches, worst relative gap {:.2e}", mismatched, worst)};
  });

  criterion(5, "night scenarios reduce to the load-only attack", 0.0, [] {
    const auto& p = pipeline();
    int nights = 0;
    double worst = 0.0;
    bool ok = true;
    for (const auto& profile : p.matrix().profiles) {
      if (profile.time != TimeOfDay::night) continue;
      ++nights;
      const auto R0 = fleet_output(p.fleet, profile);
      const auto pre = run_sced(p.network, p.model, R0, nullptr);
      if (!pre.dispatch) return Verdict{false, profile.label() + " has no pre-attack dispatch"};
      AttackInputs in{p.network.demand_vector(), R0, pre.dispatch->F, p.model.flow_limits};
      const auto full = plan_attack(p.network, p.model, in, AttackConfig{});
      auto cfg = AttackConfig{};
      cfg.manipulate_solar = false;
      const auto load_only = plan_attack(p.network, p.model, in, cfg);
      if (full.status != load_only.status) {
        ok = false;
        continue;
      }
      if (full.vector) worst = std::max(worst, std::abs(full.vector->objective - load_only.vector->objective));
    }
    ok = ok && nights == 4 && worst <= 1e-8;
    return Verdict{ok, fmt::format("{} night scenarios, max objective gap {:.2e}", nights, worst)};
  });

  criterion(6, "alpha monotonicity at the peak scenario", 0.0, [] {
    const auto& p = pipeline();
    const auto sweep = alpha_sweep(p, AttackConfig{}, {0.25, 0.5, 0.75}, peak_profile(p));
    std::string costs;
    bool ok = true;
    double prev_cost = -kInfinity, prev_shed = -kInfinity;
    for (const auto& r : sweep.rows) {
      if (!r.metrics) return Verdict{false, r.label + " has no post-attack dispatch"};
      const auto& mt = *r.metrics;
      ok = ok && mt.post_cost >= prev_cost - 1e-6 && mt.shed_total >= prev_shed - 1e-6 &&
           mt.post_cost >= mt.pre_cost - 1e-6;
      prev_cost = mt.post_cost;
      prev_shed = mt.shed_total;
      costs += fmt::format("{}{:.3f}/{:.3f} MW", costs.empty() ? "" : ", ", mt.post_cost, mt.shed_total);
    }
    return Verdict{ok, fmt::format("{}: post cost/shed {}", peak_profile(p).label(), costs)};
  });

  criterion(7, "coordinated manipulation dominates solar-only", 0.0, [] {
    const auto& p = pipeline();
    const auto study = coordination_study(p, AttackConfig{}, peak_profile(p));
    if (!study.solar_only.metrics || !study.coordinated.metrics) return Verdict{false, "missing dispatch"};
    const double so = study.solar_only.metrics->cost_increase;
    const double co = study.coordinated.metrics->cost_increase;
    const bool ok = co >= so - 1e-6 && so >= -1e-6 && co >= -1e-6;
    return Verdict{ok, fmt::format("solar-only +{:.3f}, coordinated +{:.3f} $/h", so, co)};
  });

  criterion(8, "peak solar scenario has the largest impact", 0.0, [] {
    if (!matrix_rows) return Verdict{false, "matrix unavailable"};
    const auto& p = pipeline();
    const auto peak = peak_profile(p).label();
    const ScenarioResult* top = nullptr;
    double max_cost = -kInfinity, max_shed = -kInfinity;
    for (const auto& r : *matrix_rows) {
      if (!r.attack_feasible() || !r.metrics) continue;
      max_cost = std::max(max_cost, r.metrics->post_cost);
      max_shed = std::max(max_shed, r.metrics->shed_total);
      if (r.label == peak) top = &r;
    }
    if (!top) return Verdict{false, peak + " is not a feasible scenario"};
    const bool ok = top->metrics->post_cost >= max_cost - 1e-6 && top->metrics->shed_total >= max_shed - 1e-6;
    return Verdict{ok, fmt::format("{}: post cost {:.3f} (max {:.3f}), shed {:.3f} MW (max {:.3f})", peak,
                                   top->metrics->post_cost, max_cost, top->metrics->shed_total, max_shed)};
  });

  criterion(9, "dispatch contracts", 0.0, [] {
    if (!matrix_rows) return Verdict{false, "matrix unavailable"};
    const auto& p = pipeline();
    DispatchCheck worst;
    double identity = 0.0;
    std::size_t checked = 0;
    for (const auto& r : *matrix_rows) {
      for (const auto* d : {r.pre ? &*r.pre : nullptr, r.post ? &*r.post : nullptr}) {
        if (!d) continue;
        const auto c = check_dispatch(p, *d, r.R0, d->attack ? &*d->attack : nullptr);
        worst = {std::max(worst.balance, c.balance), std::max(worst.box, c.box), std::max(worst.limit, c.limit)};
        ++checked;
      }
      const auto z = AttackVector::zero(p.network.loads.size(), r.R0.size(), p.model.line_count());
      const auto nulled = run_sced(p.network, p.model, r.R0, &z);
      if (!nulled.dispatch || !r.pre) return Verdict{false, r.label + ": null-attack dispatch missing"};
      identity = std::max(identity, std::abs(nulled.dispatch->cost - r.pre->cost) / std::max(1.0, r.pre->cost));
    }

    // Merit order: small uncongested systems against enumeration of every
    // vertex of the dispatch program.
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int merit_bad = 0;
    for (int t = 0; t < 20; ++t) {
      const int n = 1 + t % 5;
      std::vector<testing::GenSpec> gens;
      for (int g = 0; g < n; ++g) gens.push_back({1 + g % 3, 0.0, 10.0 + 60.0 * u(rng), 5.0 + 40.0 * u(rng)});
      const double demand = 20.0 + 150.0 * u(rng);
      const auto c = testing::make_case(3, {{1, 2, 0.1, 1000}, {2, 3, 0.2, 1000}, {1, 3, 0.3, 1000}}, gens,
                                        {{2, demand}}, 1000.0);
      const auto m = build_shift_factors(c);
      const auto prog = build_sced_lp(c, m, {}, nullptr);
      const auto out = solve_sced(prog, m);
      double best = 0.0;
      if (!out.dispatch || !testing::enumerate_vertices(prog.lp, best)) {
        ++merit_bad;
        continue;
      }
      // Cheapest units fill first: no unit runs while a cheaper one has headroom.
      bool ordered = true;
      for (std::size_t a = 0; a < gens.size(); ++a) {
        for (std::size_t b = 0; b < gens.size(); ++b) {
          if (gens[a].cost < gens[b].cost && out.dispatch->P[b] > 1e-6 && out.dispatch->P[a] < gens[a].p_max - 1e-6) {
            ordered = false;
          }
        }
      }
      if (!ordered || std::abs(out.dispatch->cost - best) > 1e-8 * std::max(1.0, best)) ++merit_bad;
    }

    const bool ok = checked > 0 && worst.balance <= 1e-6 && worst.box <= 1e-6 && worst.limit <= 1e-6 &&
                    identity <= 1e-8 && merit_bad == 0;
    return Verdict{ok, fmt::format("{} dispatches: balance {:.2e}, box {:.2e}, limits {:.2e}; null-attack gap "
                                   "{:.2e}; merit-order failures {}",
                                   checked, worst.balance, worst.box, worst.limit, identity, merit_bad)};
  });

  criterion(10, "matrix output is byte-identical across runs", 0.0, [] {
    const auto base = std::filesystem::temp_directory_path() / "solarlr_acceptance";
    std::filesystem::remove_all(base);
    const auto a = base / "a", b = base / "b";
    const int ra = run_cli("--out " + a.string() + " matrix");
    const int rb = run_cli("--out " + b.string() + " matrix");
    if (ra != 0 || rb != 0) return Verdict{false, fmt::format("exit codes {} and {}", ra, rb)};
    const auto ca = slurp(a / "matrix.csv"), cb = slurp(b / "matrix.csv");
    const bool ok = !ca.empty() && ca == cb;
    std::filesystem::remove_all(base);
    return Verdict{ok, fmt::format("{} bytes each, {}", ca.size(), ca == cb ? "identical" : "different")};
  });

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
