// Linear programs and the bundled dense simplex solver.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace solarlr {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

class LinearProgram {
 public:
  std::size_t add_variable(std::string name, double lower, double upper, double cost = 0.0);
  std::size_t add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs);

  void set_sense(Sense sense) { sense_ = sense; }
  Sense sense() const { return sense_; }
  void set_cost(std::size_t var, double cost);
  void set_bounds(std::size_t var, double lower, double upper);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<double>& costs() const { return costs_; }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t constraint_count() const { return constraints_.size(); }

  double objective_value(std::span<const double> values) const;

  /// Throws std::invalid_argument when a term references an undeclared
  /// variable, a rhs is not finite, or a variable has lower > upper.
  void validate() const;

 private:
  Sense sense_ = Sense::minimize;
  std::vector<Variable> variables_;
  std::vector<double> costs_;
  std::vector<Constraint> constraints_;
};

enum class SolveStatus { optimal, infeasible, unbounded };

const char* to_string(SolveStatus status);

struct LPSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> values;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// The solver lost accuracy beyond recovery (singular basis, residuals above
/// tolerance after refactorization, iteration limit).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PricingRule {
  bland,    // lowest-index improving column
  dantzig,  // most improving column, lowest index on ties
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-6;
  double optimality_tolerance = 1e-8;
  double pivot_tolerance = 1e-9;
  PricingRule pricing = PricingRule::bland;
  std::size_t refactor_interval = 100;
  std::size_t max_iterations = 500000;
};

LPSolution solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Signed violation per constraint (a.x - b for <=, b - a.x for >=,
/// |a.x - b| for =) and per variable bound. Non-positive means satisfied.
struct FeasibilityReport {
  std::vector<double> constraint_violation;
  std::vector<double> bound_violation;

  double max_violation() const;
  bool feasible(double tolerance = 1e-6) const { return max_violation() <= tolerance; }
};

FeasibilityReport check_feasibility(const LinearProgram& lp, std::span<const double> values);

/// CPLEX LP text format, for cross-checking with external solvers.
void write_lp_format(const LinearProgram& lp, std::ostream& out);

}  // namespace solarlr
