#include "dayahead/lp.hpp"

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dayahead {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

void LinearProgram::check_well_formed() const {
  const Index n = variable_count();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("bounds length differs from variable count");
  }
  if (eq_matrix.rows() != eq_rhs.size() || eq_matrix.cols() != n) {
    throw std::invalid_argument("equality block has inconsistent dimensions");
  }
  if (ineq_matrix.rows() != ineq_rhs.size() || ineq_matrix.cols() != n) {
    throw std::invalid_argument("inequality block has inconsistent dimensions");
  }
  for (Index j = 0; j < n; ++j) {
    if (!(lower[j] <= upper[j]) || lower[j] == kInfinity || upper[j] == -kInfinity) {
      throw std::invalid_argument("variable " + std::to_string(j) + " has empty bounds");
    }
  }
  if (!cost.allFinite() || !eq_rhs.allFinite() || !ineq_rhs.allFinite()) {
    throw std::invalid_argument("non-finite cost or right-hand side");
  }
}

Index LpBuilder::add_variable(double cost, double lower, double upper) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return static_cast<Index>(cost_.size()) - 1;
}

void LpBuilder::set_bounds(Index var, double lower, double upper) {
  lower_.at(static_cast<std::size_t>(var)) = lower;
  upper_.at(static_cast<std::size_t>(var)) = upper;
}

void LpBuilder::add_eq(const std::vector<Term>& terms, double rhs) {
  const Index row = eq_count();
  for (const Term& t : terms) eq_terms_.emplace_back(row, t.var, t.coef);
  eq_rhs_.push_back(rhs);
}

void LpBuilder::add_eq(std::initializer_list<Term> terms, double rhs) {
  add_eq(std::vector<Term>(terms), rhs);
}

void LpBuilder::add_le(const std::vector<Term>& terms, double rhs) {
  const Index row = ineq_count();
  for (const Term& t : terms) ineq_terms_.emplace_back(row, t.var, t.coef);
  ineq_rhs_.push_back(rhs);
}

void LpBuilder::add_le(std::initializer_list<Term> terms, double rhs) {
  add_le(std::vector<Term>(terms), rhs);
}

LinearProgram LpBuilder::build() const {
  const Index n = variable_count();
  auto to_vector = [](const std::vector<double>& v) {
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
  };
  LinearProgram lp;
  lp.cost = to_vector(cost_);
  lp.lower = to_vector(lower_);
  lp.upper = to_vector(upper_);
  lp.eq_rhs = to_vector(eq_rhs_);
  lp.ineq_rhs = to_vector(ineq_rhs_);
  lp.eq_matrix.resize(eq_count(), n);
  lp.eq_matrix.setFromTriplets(eq_terms_.begin(), eq_terms_.end());
  lp.ineq_matrix.resize(ineq_count(), n);
  lp.ineq_matrix.setFromTriplets(ineq_terms_.begin(), ineq_terms_.end());
  return lp;
}

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  lp.check_well_formed();
  detail::BoundedSimplex engine(lp, options);
  const LpStatus status = engine.solve();
  return engine.solution(status);
}

double check_kkt(const LinearProgram& lp, const LpSolution& sol) {
  const Index n = lp.variable_count();
  double worst = 0.0;
  auto note = [&worst](double v) { worst = std::max(worst, std::abs(v)); };

  // Stationarity.
  const Vector grad = lp.cost + lp.eq_matrix.transpose() * sol.eq_duals +
                      lp.ineq_matrix.transpose() * sol.ineq_duals + sol.upper_duals -
                      sol.lower_duals;
  for (Index j = 0; j < n; ++j) note(grad[j]);

  // Primal feasibility.
  const Vector eq_residual = lp.eq_matrix * sol.x - lp.eq_rhs;
  for (Index i = 0; i < eq_residual.size(); ++i) note(eq_residual[i]);
  const Vector slack = lp.ineq_rhs - lp.ineq_matrix * sol.x;
  for (Index k = 0; k < slack.size(); ++k) {
    if (slack[k] < 0) note(slack[k]);
    // Dual sign and complementary slackness.
    if (sol.ineq_duals[k] < 0) note(sol.ineq_duals[k]);
    note(sol.ineq_duals[k] * slack[k]);
  }
  for (Index j = 0; j < n; ++j) {
    const double x = sol.x[j];
    if (x < lp.lower[j]) note(lp.lower[j] - x);
    if (x > lp.upper[j]) note(x - lp.upper[j]);
    if (sol.lower_duals[j] < 0) note(sol.lower_duals[j]);
    if (sol.upper_duals[j] < 0) note(sol.upper_duals[j]);
    if (std::isfinite(lp.lower[j])) {
      note(sol.lower_duals[j] * (lp.lower[j] - x));
    } else {
      note(sol.lower_duals[j]);
    }
    if (std::isfinite(lp.upper[j])) {
      note(sol.upper_duals[j] * (x - lp.upper[j]));
    } else {
      note(sol.upper_duals[j]);
    }
  }
  return worst;
}

double dual_objective(const LinearProgram& lp, const LpSolution& sol) {
  double value = -sol.eq_duals.dot(lp.eq_rhs) - sol.ineq_duals.dot(lp.ineq_rhs);
  for (Index j = 0; j < lp.variable_count(); ++j) {
    if (std::isfinite(lp.lower[j])) value += sol.lower_duals[j] * lp.lower[j];
    if (std::isfinite(lp.upper[j])) value -= sol.upper_duals[j] * lp.upper[j];
  }
  return value;
}

}  // namespace dayahead
