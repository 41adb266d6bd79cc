// Grid case data: buses, branches, generators, loads and the
// conventional/solar generator partition.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace solarlr {

/// Raised for malformed case text. Carries the 1-based position of the
/// offending token.
class CaseSyntaxError : public std::runtime_error {
 public:
  CaseSyntaxError(const std::string& what, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Raised when the case parses but violates a model invariant (dangling
/// bus reference, non-positive reactance, islanded network, ...).
class CaseSemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GeneratorKind { conventional, solar };

/// How a quadratic cost row c2*p^2 + c1*p + c0 becomes one $/MWh figure.
enum class CostLinearization {
  linear,   // c1
  secant,   // c1 + c2*(p_min + p_max): average incremental cost over [p_min, p_max]
};

struct Bus {
  int id = 0;
  bool is_slack = false;
};

struct Branch {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double reactance = 0.0;   // p.u.
  double flow_limit = 0.0;  // MW, 0 means unlimited

  bool unlimited() const noexcept { return flow_limit <= 0.0; }
};

struct Generator {
  int id = 0;
  int bus = 0;
  double p_min = 0.0;
  double p_max = 0.0;
  double marginal_cost = 0.0;  // $/MWh
  GeneratorKind kind = GeneratorKind::conventional;
  double rated_capacity = 0.0;  // s^r, set when designated solar
};

struct LoadPoint {
  int id = 0;
  int bus = 0;
  double demand = 0.0;     // MW
  double shed_cost = 0.0;  // $/MWh
};

struct CaseOptions {
  CostLinearization linearization = CostLinearization::secant;
  /// Shed cost as a multiple of the most expensive conventional unit.
  double shed_cost_multiplier = 10.0;
  /// Uniform shed cost; overrides the multiplier when set.
  std::optional<double> shed_cost;
};

class NetworkCase {
 public:
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<LoadPoint> loads;

  /// Position of a bus id in `buses`; throws std::out_of_range if absent.
  std::size_t bus_index(int bus_id) const;
  std::size_t generator_index(int generator_id) const;
  int slack_bus() const;

  /// Positions (into `generators`) of each kind, ascending.
  std::vector<std::size_t> conventional_units() const;
  std::vector<std::size_t> solar_units() const;

  std::vector<double> demand_vector() const;

  /// Checks every invariant; throws CaseSemanticError on the first breach.
  void validate() const;
};

struct CaseSummary {
  std::size_t bus_count = 0;
  std::size_t branch_count = 0;
  std::size_t limited_branch_count = 0;
  std::size_t generator_count = 0;
  std::size_t load_count = 0;
  std::size_t solar_count = 0;
  double total_demand = 0.0;
  double conventional_capacity = 0.0;
  double solar_capacity = 0.0;
  double total_capacity = 0.0;
};

/// Parses the MATPOWER `.m` subset described in README.md (mpc.baseMVA,
/// mpc.bus, mpc.gen, mpc.branch, mpc.gencost). Every generator comes back
/// conventional; see designate_solar.
NetworkCase parse_case(std::string_view text, const CaseOptions& options = {});
NetworkCase load_case_file(const std::string& path, const CaseOptions& options = {});

/// Returns a copy where the listed generator ids are solar units with
/// s^r = p_max. Unknown or repeated ids throw std::invalid_argument.
NetworkCase designate_solar(const NetworkCase& network, const std::vector<int>& generator_ids);

/// One generator id per line; '#' starts a comment.
std::vector<int> parse_solar_selection(std::string_view text);
std::vector<int> load_solar_selection_file(const std::string& path);

/// Ascending-id pick of `count` units whose p_max equals total_mw / count.
/// Throws std::invalid_argument when the case has fewer such units.
std::vector<int> default_solar_selection(const NetworkCase& network, std::size_t count,
                                         double total_mw);

CaseSummary case_summary(const NetworkCase& network);

/// Stable 64-bit digest of the parsed case contents.
std::uint64_t case_fingerprint(const NetworkCase& network);

std::string read_text_file(const std::string& path);

}  // namespace solarlr
