#include "solarlr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>

namespace solarlr {

std::size_t LinearProgram::add_variable(std::string name, double lower, double upper, double cost) {
  variables_.push_back({std::move(name), lower, upper});
  costs_.push_back(cost);
  return variables_.size() - 1;
}

std::size_t LinearProgram::add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs) {
  constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
  return constraints_.size() - 1;
}

void LinearProgram::set_cost(std::size_t var, double cost) { costs_.at(var) = cost; }

void LinearProgram::set_bounds(std::size_t var, double lower, double upper) {
  auto& v = variables_.at(var);
  v.lower = lower;
  v.upper = upper;
}

double LinearProgram::objective_value(std::span<const double> values) const {
  double z = 0.0;
  for (std::size_t j = 0; j < costs_.size(); ++j) z += costs_[j] * values[j];
  return z;
}

void LinearProgram::validate() const {
  for (const auto& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper || v.lower == kInfinity ||
        v.upper == -kInfinity) {
      throw std::invalid_argument(fmt::format("variable '{}' has invalid bounds [{}, {}]", v.name, v.lower, v.upper));
    }
  }
  for (double c : costs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("objective coefficient is not finite");
  }
  for (const auto& c : constraints_) {
    if (!std::isfinite(c.rhs)) throw std::invalid_argument(fmt::format("constraint '{}' has non-finite rhs", c.name));
    for (const auto& t : c.terms) {
      if (t.var >= variables_.size()) {
        throw std::invalid_argument(fmt::format("constraint '{}' references undeclared variable {}", c.name, t.var));
      }
      if (!std::isfinite(t.coef)) {
        throw std::invalid_argument(fmt::format("constraint '{}' has a non-finite coefficient", c.name));
      }
    }
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
  }
  return "?";
}

double FeasibilityReport::max_violation() const {
  double worst = 0.0;
  for (double v : constraint_violation) worst = std::max(worst, v);
  for (double v : bound_violation) worst = std::max(worst, v);
  return worst;
}

FeasibilityReport check_feasibility(const LinearProgram& lp, std::span<const double> values) {
  if (values.size() != lp.variable_count()) {
    throw std::invalid_argument(
        fmt::format("point has {} values for {} variables", values.size(), lp.variable_count()));
  }
  FeasibilityReport report;
  report.constraint_violation.reserve(lp.constraint_count());
  for (const auto& c : lp.constraints()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) {
      if (t.var >= values.size()) throw std::invalid_argument(fmt::format("unknown variable {}", t.var));
      lhs += t.coef * values[t.var];
    }
    switch (c.relation) {
      case Relation::less_equal:
        report.constraint_violation.push_back(lhs - c.rhs);
        break;
      case Relation::greater_equal:
        report.constraint_violation.push_back(c.rhs - lhs);
        break;
      case Relation::equal:
        report.constraint_violation.push_back(std::abs(lhs - c.rhs));
        break;
    }
  }
  report.bound_violation.reserve(lp.variable_count());
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    const auto& v = lp.variables()[j];
    report.bound_violation.push_back(std::max(v.lower - values[j], values[j] - v.upper));
  }
  return report;
}

namespace {

std::string lp_name(const std::string& raw, char prefix, std::size_t index) {
  std::string out;
  for (char c : raw) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ? c : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') {
    out = fmt::format("{}{}_{}", prefix, index, out);
  }
  return out;
}

void write_linear(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  for (const auto& [c, name] : terms) out << (c < 0 ? " - " : " + ") << fmt::format("{:.17g}", std::abs(c)) << ' ' << name;
}

}  // namespace

void write_lp_format(const LinearProgram& lp, std::ostream& out) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < lp.variable_count(); ++j) names.push_back(lp_name(lp.variables()[j].name, 'x', j));

  out << (lp.sense() == Sense::maximize ? "Maximize\n" : "Minimize\n") << " obj:";
  std::vector<std::pair<double, std::string>> obj;
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    if (lp.costs()[j] != 0.0) obj.emplace_back(lp.costs()[j], names[j]);
  }
  write_linear(out, obj);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.constraint_count(); ++i) {
    const auto& c = lp.constraints()[i];
    out << ' ' << lp_name(c.name, 'c', i) << ':';
    std::vector<std::pair<double, std::string>> terms;
    for (const auto& t : c.terms) terms.emplace_back(t.coef, names[t.var]);
    write_linear(out, terms);
    const char* rel = c.relation == Relation::less_equal ? "<=" : c.relation == Relation::equal ? "=" : ">=";
    out << ' ' << rel << ' ' << fmt::format("{:.17g}", c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    const auto& v = lp.variables()[j];
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      out << ' ' << names[j] << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << names[j] << " = " << fmt::format("{:.17g}", v.lower) << '\n';
    } else {
      out << ' ' << (v.lower == -kInfinity ? std::string("-inf") : fmt::format("{:.17g}", v.lower)) << " <= "
          << names[j] << " <= " << (v.upper == kInfinity ? std::string("+inf") : fmt::format("{:.17g}", v.upper))
          << '\n';
    }
  }
  out << "End\n";
}

}  // namespace solarlr
