#pragma once

#include "dayahead/common.hpp"

#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace dayahead {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// min cost'x  s.t.  eq_matrix x = eq_rhs,  ineq_matrix x <= ineq_rhs,
///                   lower <= x <= upper   (bounds may be infinite).
struct LinearProgram {
  Vector cost;
  SparseMatrix eq_matrix;
  Vector eq_rhs;
  SparseMatrix ineq_matrix;
  Vector ineq_rhs;
  Vector lower;
  Vector upper;

  Index variable_count() const { return cost.size(); }
  Index eq_count() const { return eq_rhs.size(); }
  Index ineq_count() const { return ineq_rhs.size(); }

  /// Throws std::invalid_argument on inconsistent dimensions or lower > upper.
  void check_well_formed() const;
};

/// Row-at-a-time construction of a LinearProgram.
class LpBuilder {
 public:
  struct Term {
    Index var;
    double coef;
  };

  Index add_variable(double cost, double lower = 0.0, double upper = kInfinity);
  void add_eq(std::initializer_list<Term> terms, double rhs);
  void add_eq(const std::vector<Term>& terms, double rhs);
  void add_le(std::initializer_list<Term> terms, double rhs);
  void add_le(const std::vector<Term>& terms, double rhs);
  void set_bounds(Index var, double lower, double upper);

  Index variable_count() const { return static_cast<Index>(cost_.size()); }
  Index eq_count() const { return static_cast<Index>(eq_rhs_.size()); }
  Index ineq_count() const { return static_cast<Index>(ineq_rhs_.size()); }

  LinearProgram build() const;

 private:
  std::vector<double> cost_, lower_, upper_, eq_rhs_, ineq_rhs_;
  std::vector<Eigen::Triplet<double>> eq_terms_, ineq_terms_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status);

/// Primal solution plus duals in the convention
///   c + A_eq' lambda + A_in' mu + tau_upper - tau_lower = 0,
///   mu, tau_upper, tau_lower >= 0.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  Vector eq_duals;     // lambda
  Vector ineq_duals;   // mu
  Vector lower_duals;  // tau_lower
  Vector upper_duals;  // tau_upper
  Index iterations = 0;
};

struct SimplexOptions {
  /// Log every pivot to std::clog.
  bool trace = false;
  Index max_iterations = 100000;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  Index degenerate_pivots_before_bland = 50;
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Largest violation among stationarity, primal feasibility, dual signs and
/// complementary slackness.
double check_kkt(const LinearProgram& lp, const LpSolution& sol);

/// -lambda'b_eq - mu'b_in + tau_lower'l - tau_upper'u (infinite bounds skipped).
double dual_objective(const LinearProgram& lp, const LpSolution& sol);

}  // namespace dayahead
