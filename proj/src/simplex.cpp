// Two-phase primal simplex on a dense tableau with bounded variables.
//
// Every variable is shifted so its lower bound is 0 (mirrored when only the
// upper bound is finite, split when free). Nonbasic columns sit at 0 or at
// their upper bound. The tableau is rebuilt from an LU factorization of the
// basis every `refactor_interval` pivots and once more before the solution
// is read back.
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "solarlr/lp.hpp"

namespace solarlr {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class State : unsigned char { basic, at_lower, at_upper };

struct ColumnMap {
  std::size_t col = 0;
  double sign = 1.0;
  double offset = 0.0;
  std::ptrdiff_t negative_col = -1;  // free variables: x = y(col) - y(negative_col)
};

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& options) : lp_(lp), opt_(options) { build(); }

  LPSolution run() {
    LPSolution sol;
    std::vector<char> may_enter(n_);
    for (std::size_t j = 0; j < n_; ++j) may_enter[j] = !artificial_[j];

    std::vector<double> phase1(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase1[j] = artificial_[j] ? 1.0 : 0.0;
    iterate(phase1, may_enter);

    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (artificial_[basis_[i]]) infeasibility += std::max(0.0, xB_[static_cast<Eigen::Index>(i)]);
    }
    sol.iterations = iterations_;
    if (infeasibility > opt_.feasibility_tolerance) {
      sol.status = SolveStatus::infeasible;
      return sol;
    }
    drive_out_artificials();

    const bool unbounded = !iterate(phase2_, may_enter);
    sol.iterations = iterations_;
    if (unbounded) {
      sol.status = SolveStatus::unbounded;
      return sol;
    }
    refactor(phase2_);

    sol.status = SolveStatus::optimal;
    sol.values = original_values();
    sol.objective = lp_.objective_value(sol.values);
    const double violation = check_feasibility(lp_, sol.values).max_violation();
    if (violation > opt_.feasibility_tolerance) {
      throw NumericalError(fmt::format("simplex solution violates constraints by {:.3g}", violation));
    }
    return sol;
  }

 private:
  const LinearProgram& lp_;
  SimplexOptions opt_;

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  RowMatrix A_;
  Eigen::VectorXd b_;
  std::vector<double> upper_;
  std::vector<double> phase2_;
  std::vector<char> artificial_;
  std::vector<ColumnMap> map_;

  RowMatrix T_;
  Eigen::VectorXd xB_;
  Eigen::VectorXd d_;
  std::vector<std::size_t> basis_;
  std::vector<State> state_;
  std::size_t iterations_ = 0;

  void build() {
    lp_.validate();
    const auto& vars = lp_.variables();
    const auto& cons = lp_.constraints();
    const double obj_sign = lp_.sense() == Sense::maximize ? -1.0 : 1.0;

    // Structural columns.
    std::vector<double> upper, cost;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const auto& v = vars[j];
      const double c = obj_sign * lp_.costs()[j];
      ColumnMap cm;
      cm.col = upper.size();
      if (std::isfinite(v.lower)) {
        cm.offset = v.lower;
        upper.push_back(v.upper - v.lower);
        cost.push_back(c);
      } else if (std::isfinite(v.upper)) {
        cm.sign = -1.0;
        cm.offset = v.upper;
        upper.push_back(kInfinity);
        cost.push_back(-c);
      } else {
        upper.push_back(kInfinity);
        cost.push_back(c);
        cm.negative_col = static_cast<std::ptrdiff_t>(upper.size());
        upper.push_back(kInfinity);
        cost.push_back(-c);
      }
      map_.push_back(cm);
    }
    const std::size_t structural = upper.size();

    m_ = cons.size();
    std::size_t slacks = 0;
    for (const auto& c : cons) slacks += c.relation == Relation::equal ? 0 : 1;

    // Rows after moving offsets to the rhs and flipping to b >= 0.
    RowMatrix rows = RowMatrix::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(structural + slacks));
    b_.resize(static_cast<Eigen::Index>(m_));
    std::vector<std::ptrdiff_t> unit_slack(m_, -1);
    std::size_t slack_col = structural;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& c = cons[i];
      const auto r = static_cast<Eigen::Index>(i);
      double rhs = c.rhs;
      for (const auto& t : c.terms) {
        const auto& cm = map_[t.var];
        rhs -= t.coef * cm.offset;
        rows(r, static_cast<Eigen::Index>(cm.col)) += t.coef * cm.sign;
        if (cm.negative_col >= 0) rows(r, cm.negative_col) -= t.coef;
      }
      double slack_coef = 0.0;
      if (c.relation != Relation::equal) {
        slack_coef = c.relation == Relation::less_equal ? 1.0 : -1.0;
        rows(r, static_cast<Eigen::Index>(slack_col)) = slack_coef;
      }
      if (rhs < 0.0) {
        rows.row(r) *= -1.0;
        rhs = -rhs;
        slack_coef = -slack_coef;
      }
      b_(r) = rhs;
      if (slack_coef > 0.0) unit_slack[i] = static_cast<std::ptrdiff_t>(slack_col);
      if (c.relation != Relation::equal) ++slack_col;
    }
    for (std::size_t s = 0; s < slacks; ++s) {
      upper.push_back(kInfinity);
      cost.push_back(0.0);
    }

    std::size_t artificials = 0;
    for (auto s : unit_slack) artificials += s < 0 ? 1 : 0;
    n_ = structural + slacks + artificials;
    A_ = RowMatrix::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
    A_.leftCols(rows.cols()) = rows;
    artificial_.assign(n_, 0);
    basis_.resize(m_);
    std::size_t art_col = structural + slacks;
    for (std::size_t i = 0; i < m_; ++i) {
      if (unit_slack[i] >= 0) {
        basis_[i] = static_cast<std::size_t>(unit_slack[i]);
      } else {
        A_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(art_col)) = 1.0;
        artificial_[art_col] = 1;
        upper.push_back(kInfinity);
        cost.push_back(0.0);
        basis_[i] = art_col++;
      }
    }
    upper_ = std::move(upper);
    phase2_ = std::move(cost);

    state_.assign(n_, State::at_lower);
    for (auto j : basis_) state_[j] = State::basic;
  }

  double nonbasic_value(std::size_t j) const { return state_[j] == State::at_upper ? upper_[j] : 0.0; }

  void refactor(const std::vector<double>& cost) {
    const auto m = static_cast<Eigen::Index>(m_);
    if (m == 0) {
      d_ = Eigen::Map<const Eigen::VectorXd>(cost.data(), static_cast<Eigen::Index>(n_));
      return;
    }
    Eigen::MatrixXd B(m, m);
    for (Eigen::Index i = 0; i < m; ++i) B.col(i) = A_.col(static_cast<Eigen::Index>(basis_[static_cast<std::size_t>(i)]));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    if (!(lu.rcond() > 1e-14)) throw NumericalError(fmt::format("basis is singular (rcond {:.3g})", lu.rcond()));
    T_ = lu.solve(Eigen::MatrixXd(A_));

    Eigen::VectorXd rhs = b_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == State::at_upper) rhs -= upper_[j] * A_.col(static_cast<Eigen::Index>(j));
    }
    xB_ = lu.solve(rhs);

    Eigen::VectorXd cB(m);
    for (Eigen::Index i = 0; i < m; ++i) cB(i) = cost[basis_[static_cast<std::size_t>(i)]];
    d_ = Eigen::Map<const Eigen::VectorXd>(cost.data(), static_cast<Eigen::Index>(n_)) - T_.transpose() * cB;
  }

  void pivot(std::size_t r, std::size_t j) {
    const auto rr = static_cast<Eigen::Index>(r);
    const auto jj = static_cast<Eigen::Index>(j);
    T_.row(rr) /= T_(rr, jj);
    for (Eigen::Index i = 0; i < T_.rows(); ++i) {
      if (i == rr) continue;
      const double f = T_(i, jj);
      if (f != 0.0) T_.row(i) -= f * T_.row(rr);
    }
    const double fd = d_(jj);
    if (fd != 0.0) d_ -= fd * T_.row(rr).transpose();
    d_(jj) = 0.0;
  }

  // Returns false when the phase objective is unbounded below.
  bool iterate(const std::vector<double>& cost, const std::vector<char>& may_enter) {
    refactor(cost);
    std::size_t since_refactor = 0;
    while (true) {
      if (iterations_ >= opt_.max_iterations) {
        throw NumericalError(fmt::format("simplex iteration limit {} reached", opt_.max_iterations));
      }
      if (since_refactor >= opt_.refactor_interval) {
        refactor(cost);
        since_refactor = 0;
      }

      std::ptrdiff_t enter = -1;
      double best = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (state_[j] == State::basic || !may_enter[j] || upper_[j] <= 0.0) continue;
        const double dj = d_(static_cast<Eigen::Index>(j));
        const bool improving = (state_[j] == State::at_lower && dj < -opt_.optimality_tolerance) ||
                               (state_[j] == State::at_upper && dj > opt_.optimality_tolerance);
        if (!improving) continue;
        if (opt_.pricing == PricingRule::bland) {
          enter = static_cast<std::ptrdiff_t>(j);
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          enter = static_cast<std::ptrdiff_t>(j);
        }
      }
      if (enter < 0) return true;
      const auto j = static_cast<std::size_t>(enter);
      const auto jj = static_cast<Eigen::Index>(j);
      const double dir = state_[j] == State::at_lower ? 1.0 : -1.0;

      // Ratio test; ties go to the lowest-index basic column.
      double t_min = kInfinity;
      std::ptrdiff_t leave = -1;
      bool leave_to_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double rate = dir * T_(ii, jj);
        double t = 0.0;
        bool to_upper = false;
        if (rate > opt_.pivot_tolerance) {
          t = std::max(xB_(ii), 0.0) / rate;
        } else if (rate < -opt_.pivot_tolerance && std::isfinite(upper_[basis_[i]])) {
          t = std::max(upper_[basis_[i]] - xB_(ii), 0.0) / -rate;
          to_upper = true;
        } else {
          continue;
        }
        if (leave < 0 || t < t_min - 1e-12 * std::max(1.0, t_min)) {
          t_min = t;
          leave = static_cast<std::ptrdiff_t>(i);
          leave_to_upper = to_upper;
        } else if (t <= t_min + 1e-12 * std::max(1.0, t_min) &&
                   basis_[i] < basis_[static_cast<std::size_t>(leave)]) {
          t_min = std::min(t_min, t);
          leave = static_cast<std::ptrdiff_t>(i);
          leave_to_upper = to_upper;
        }
      }

      ++iterations_;
      const double flip = upper_[j];
      if (flip <= t_min) {
        if (!std::isfinite(flip)) return false;
        xB_ -= (dir * flip) * T_.col(jj);
        state_[j] = state_[j] == State::at_lower ? State::at_upper : State::at_lower;
        continue;
      }
      if (leave < 0) return false;

      const auto r = static_cast<std::size_t>(leave);
      const double enter_value = nonbasic_value(j) + dir * t_min;
      xB_ -= (dir * t_min) * T_.col(jj);
      state_[basis_[r]] = leave_to_upper ? State::at_upper : State::at_lower;
      pivot(r, j);
      xB_(static_cast<Eigen::Index>(r)) = enter_value;
      basis_[r] = j;
      state_[j] = State::basic;
      ++since_refactor;
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!artificial_[basis_[r]]) continue;
      const auto rr = static_cast<Eigen::Index>(r);
      for (std::size_t j = 0; j < n_; ++j) {
        if (artificial_[j] || state_[j] == State::basic) continue;
        if (std::abs(T_(rr, static_cast<Eigen::Index>(j))) > 1e-7) {
          const double value = nonbasic_value(j);
          state_[basis_[r]] = State::at_lower;
          pivot(r, j);
          xB_(rr) = value;
          basis_[r] = j;
          state_[j] = State::basic;
          break;
        }
      }
    }
    // Artificials still basic sit on redundant rows; pin them at zero.
    for (std::size_t j = 0; j < n_; ++j) {
      if (artificial_[j]) upper_[j] = 0.0;
    }
  }

  std::vector<double> original_values() const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) y[j] = nonbasic_value(j);
    for (std::size_t i = 0; i < m_; ++i) y[basis_[i]] = xB_(static_cast<Eigen::Index>(i));
    std::vector<double> x(map_.size());
    for (std::size_t k = 0; k < map_.size(); ++k) {
      const auto& cm = map_[k];
      if (cm.negative_col >= 0) {
        x[k] = y[cm.col] - y[static_cast<std::size_t>(cm.negative_col)];
      } else {
        x[k] = cm.offset + cm.sign * y[cm.col];
      }
    }
    return x;
  }
};

}  // namespace

LPSolution solve(const LinearProgram& lp, const SimplexOptions& options) {
  BoundedSimplex simplex(lp, options);
  return simplex.run();
}

}  // namespace solarlr
