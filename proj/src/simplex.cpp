#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace dayahead::detail {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kOptimalityTol = 1e-9;
constexpr double kFeasibilityTol = 1e-9;
constexpr double kPhaseOneTol = 1e-7;
constexpr double kTieTol = 1e-12;
constexpr std::size_t kRefactorInterval = 64;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

// ---------------------------------------------------------------------------
// BasisFactor

void BasisFactor::factor(const SparseMatrix& a, const std::vector<Index>& basic) {
  rows_ = a.rows();
  etas_.clear();
  if (rows_ == 0) return;
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index r = 0; r < rows_; ++r) {
    for (SparseMatrix::InnerIterator it(a, basic[static_cast<std::size_t>(r)]); it; ++it) {
      triplets.emplace_back(it.row(), r, it.value());
    }
  }
  SparseMatrix b(rows_, rows_);
  b.setFromTriplets(triplets.begin(), triplets.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  if (lu_.info() != Eigen::Success) throw Error("simplex basis is singular");
}

void BasisFactor::ftran(Vector& v) const {
  if (rows_ == 0) return;
  Vector solved = lu_.solve(v);
  v.swap(solved);
  for (const Eta& eta : etas_) {
    const double pivot = v[eta.row] / eta.alpha[eta.row];
    if (pivot != 0.0) v -= pivot * eta.alpha;
    v[eta.row] = pivot;
  }
}

void BasisFactor::btran(Vector& v) const {
  if (rows_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const double dot = v.dot(it->alpha) - v[it->row] * it->alpha[it->row];
    v[it->row] = (v[it->row] - dot) / it->alpha[it->row];
  }
  Vector solved = lu_.transpose().solve(v);
  v.swap(solved);
}

void BasisFactor::update(Index row, const Vector& alpha) { etas_.push_back({row, alpha}); }

// ---------------------------------------------------------------------------
// BoundedSimplex

BoundedSimplex::BoundedSimplex(const LinearProgram& lp, const SimplexOptions& options)
    : options_(options) {
  structural_ = lp.variable_count();
  eq_rows_ = lp.eq_count();
  rows_ = eq_rows_ + lp.ineq_count();
  first_slack_ = structural_;
  first_artificial_ = structural_ + lp.ineq_count();
  columns_ = first_artificial_ + rows_;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(lp.eq_matrix.nonZeros() +
                                            lp.ineq_matrix.nonZeros() + 2 * rows_));
  for (Index j = 0; j < lp.eq_matrix.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(lp.eq_matrix, j); it; ++it) {
      if (it.value() != 0.0) triplets.emplace_back(it.row(), j, it.value());
    }
  }
  for (Index j = 0; j < lp.ineq_matrix.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(lp.ineq_matrix, j); it; ++it) {
      if (it.value() != 0.0) triplets.emplace_back(eq_rows_ + it.row(), j, it.value());
    }
  }
  for (Index k = 0; k < lp.ineq_count(); ++k) {
    triplets.emplace_back(eq_rows_ + k, first_slack_ + k, 1.0);
  }
  for (Index i = 0; i < rows_; ++i) triplets.emplace_back(i, first_artificial_ + i, 1.0);
  a_.resize(rows_, columns_);
  a_.setFromTriplets(triplets.begin(), triplets.end());
  a_.makeCompressed();

  b_.resize(rows_);
  b_ << lp.eq_rhs, lp.ineq_rhs;

  cost_ = Vector::Zero(columns_);
  cost_.head(structural_) = lp.cost;
  lower_ = Vector::Zero(columns_);
  upper_ = Vector::Constant(columns_, kInfinity);
  lower_.head(structural_) = lp.lower;
  upper_.head(structural_) = lp.upper;
  x_ = Vector::Zero(columns_);
  state_.assign(static_cast<std::size_t>(columns_), VarState::AtLower);
  basic_.assign(static_cast<std::size_t>(rows_), 0);
}

void BoundedSimplex::load_column(Index j, Vector& out) const {
  out.setZero(rows_);
  for (SparseMatrix::InnerIterator it(a_, j); it; ++it) out[it.row()] = it.value();
}

double BoundedSimplex::column_dot(Index j, const Vector& y) const {
  double s = 0.0;
  for (SparseMatrix::InnerIterator it(a_, j); it; ++it) s += it.value() * y[it.row()];
  return s;
}

Vector BoundedSimplex::basic_costs(const Vector& costs) const {
  Vector cb(rows_);
  for (Index r = 0; r < rows_; ++r) cb[r] = costs[basic_[static_cast<std::size_t>(r)]];
  return cb;
}

void BoundedSimplex::refactor() {
  factor_.factor(a_, basic_);
  compute_basic_values();
}

void BoundedSimplex::compute_basic_values() {
  Vector rhs = b_;
  for (Index j = 0; j < columns_; ++j) {
    if (state_[static_cast<std::size_t>(j)] == VarState::Basic || x_[j] == 0.0) continue;
    for (SparseMatrix::InnerIterator it(a_, j); it; ++it) rhs[it.row()] -= it.value() * x_[j];
  }
  factor_.ftran(rhs);
  for (Index r = 0; r < rows_; ++r) x_[basic_[static_cast<std::size_t>(r)]] = rhs[r];
}

void BoundedSimplex::bump_iteration(const char* kind, Index entering, Index leaving) {
  if (++iterations_ > options_.max_iterations) {
    throw Error("simplex iteration limit exceeded");
  }
  if (options_.trace) {
    std::clog << "[simplex] " << kind << " it=" << iterations_ << " enter=" << entering
              << " leave=" << leaving << '\n';
  }
}

void BoundedSimplex::pivot(Index row, Index entering, const Vector& alpha, double step) {
  // Entering variable moves by `step`; basic values move by -step * alpha.
  for (Index r = 0; r < rows_; ++r) {
    if (alpha[r] != 0.0) x_[basic_[static_cast<std::size_t>(r)]] -= step * alpha[r];
  }
  x_[entering] += step;
  const Index leaving = basic_[static_cast<std::size_t>(row)];
  const double lo = lower_[leaving];
  const double hi = upper_[leaving];
  // Snap the leaving variable onto whichever bound it reached.
  if (finite(lo) && (!finite(hi) || std::abs(x_[leaving] - lo) <= std::abs(x_[leaving] - hi))) {
    x_[leaving] = lo;
    state_[static_cast<std::size_t>(leaving)] = VarState::AtLower;
  } else {
    x_[leaving] = hi;
    state_[static_cast<std::size_t>(leaving)] = VarState::AtUpper;
  }
  basic_[static_cast<std::size_t>(row)] = entering;
  state_[static_cast<std::size_t>(entering)] = VarState::Basic;
  factor_.update(row, alpha);
  if (factor_.eta_count() >= kRefactorInterval) refactor();
}

BoundedSimplex::PrimalResult BoundedSimplex::primal(const Vector& costs) {
  Index degenerate_run = 0;
  bool bland = false;
  Vector y;
  Vector alpha;
  for (;;) {
    y = basic_costs(costs);
    factor_.btran(y);

    Index entering = -1;
    double entering_d = 0.0;
    double best_score = 0.0;
    for (Index j = 0; j < columns_; ++j) {
      const VarState s = state_[static_cast<std::size_t>(j)];
      if (s == VarState::Basic || lower_[j] == upper_[j]) continue;
      const double d = costs[j] - column_dot(j, y);
      const bool eligible = (s == VarState::AtLower && d < -kOptimalityTol) ||
                            (s == VarState::AtUpper && d > kOptimalityTol) ||
                            (s == VarState::FreeZero && std::abs(d) > kOptimalityTol);
      if (!eligible) continue;
      if (bland) {
        entering = j;
        entering_d = d;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        entering_d = d;
      }
    }
    if (entering < 0) return PrimalResult::Optimal;

    const double dir = entering_d < 0 ? 1.0 : -1.0;
    load_column(entering, alpha);
    factor_.ftran(alpha);

    double step = (finite(lower_[entering]) && finite(upper_[entering]))
                      ? upper_[entering] - lower_[entering]
                      : kInfinity;
    Index leave_row = -1;
    for (Index r = 0; r < rows_; ++r) {
      const double a = alpha[r] * dir;
      if (std::abs(a) <= kPivotTol) continue;
      const Index col = basic_[static_cast<std::size_t>(r)];
      double t;
      if (a > 0) {
        if (!finite(lower_[col])) continue;
        t = (x_[col] - lower_[col]) / a;
      } else {
        if (!finite(upper_[col])) continue;
        t = (upper_[col] - x_[col]) / -a;
      }
      t = std::max(t, 0.0);
      bool take = t < step - kTieTol;
      if (!take && leave_row >= 0 && std::abs(t - step) <= kTieTol) {
        if (bland) {
          take = col < basic_[static_cast<std::size_t>(leave_row)];
        } else {
          take = std::abs(alpha[r]) > std::abs(alpha[leave_row]);
        }
      } else if (!take && leave_row < 0 && std::abs(t - step) <= kTieTol && finite(step)) {
        // Prefer a basis change over a bound flip of equal length.
        take = true;
      }
      if (take) {
        step = t;
        leave_row = r;
      }
    }
    if (!finite(step)) return PrimalResult::Unbounded;

    const bool degenerate = step <= kTieTol;
    degenerate_run = degenerate ? degenerate_run + 1 : 0;
    bland = degenerate_run >= options_.degenerate_pivots_before_bland;

    if (leave_row < 0) {
      // Bound flip: no basis change.
      bump_iteration("flip", entering, -1);
      for (Index r = 0; r < rows_; ++r) {
        if (alpha[r] != 0.0) x_[basic_[static_cast<std::size_t>(r)]] -= dir * step * alpha[r];
      }
      if (dir > 0) {
        x_[entering] = upper_[entering];
        state_[static_cast<std::size_t>(entering)] = VarState::AtUpper;
      } else {
        x_[entering] = lower_[entering];
        state_[static_cast<std::size_t>(entering)] = VarState::AtLower;
      }
      continue;
    }
    bump_iteration("primal", entering, basic_[static_cast<std::size_t>(leave_row)]);
    pivot(leave_row, entering, alpha, dir * step);
  }
}

LpStatus BoundedSimplex::solve() {
  // Nonbasic structurals start at their bound nearest to a finite value.
  for (Index j = 0; j < structural_; ++j) {
    auto& s = state_[static_cast<std::size_t>(j)];
    if (finite(lower_[j])) {
      s = VarState::AtLower;
      x_[j] = lower_[j];
    } else if (finite(upper_[j])) {
      s = VarState::AtUpper;
      x_[j] = upper_[j];
    } else {
      s = VarState::FreeZero;
      x_[j] = 0.0;
    }
  }
  for (Index j = first_slack_; j < columns_; ++j) {
    state_[static_cast<std::size_t>(j)] = VarState::AtLower;
    x_[j] = 0.0;
  }

  Vector residual = b_;
  for (Index j = 0; j < structural_; ++j) {
    if (x_[j] == 0.0) continue;
    for (SparseMatrix::InnerIterator it(a_, j); it; ++it) residual[it.row()] -= it.value() * x_[j];
  }

  bool need_phase_one = false;
  for (Index i = 0; i < rows_; ++i) {
    const Index art = first_artificial_ + i;
    const bool slack_fits = i >= eq_rows_ && residual[i] >= 0.0;
    if (slack_fits) {
      const Index slack = first_slack_ + (i - eq_rows_);
      basic_[static_cast<std::size_t>(i)] = slack;
      state_[static_cast<std::size_t>(slack)] = VarState::Basic;
      a_.coeffRef(i, art) = 1.0;
      lower_[art] = upper_[art] = 0.0;
    } else {
      basic_[static_cast<std::size_t>(i)] = art;
      state_[static_cast<std::size_t>(art)] = VarState::Basic;
      a_.coeffRef(i, art) = residual[i] >= 0.0 ? 1.0 : -1.0;
      lower_[art] = 0.0;
      upper_[art] = kInfinity;
      need_phase_one = true;
    }
  }
  has_basis_ = true;
  refactor();

  if (need_phase_one) {
    Vector phase_one = Vector::Zero(columns_);
    for (Index i = 0; i < rows_; ++i) {
      const Index art = first_artificial_ + i;
      if (upper_[art] > 0.0) phase_one[art] = 1.0;
    }
    primal(phase_one);
    const double infeasibility = phase_one.dot(x_);
    for (Index i = 0; i < rows_; ++i) {
      const Index art = first_artificial_ + i;
      lower_[art] = upper_[art] = 0.0;
      if (state_[static_cast<std::size_t>(art)] != VarState::Basic) {
        state_[static_cast<std::size_t>(art)] = VarState::AtLower;
        x_[art] = 0.0;
      }
    }
    if (infeasibility > kPhaseOneTol) return LpStatus::Infeasible;
  }
  return primal(cost_) == PrimalResult::Optimal ? LpStatus::Optimal : LpStatus::Unbounded;
}

void BoundedSimplex::load_basis(const Basis& basis) {
  basic_ = basis.basic;
  state_ = basis.state;
  has_basis_ = true;
}

bool BoundedSimplex::prepare_dual_start() {
  factor_.factor(a_, basic_);
  Vector y = basic_costs(cost_);
  factor_.btran(y);
  for (Index j = 0; j < columns_; ++j) {
    auto& s = state_[static_cast<std::size_t>(j)];
    if (s == VarState::Basic) continue;
    const double lo = lower_[j];
    const double hi = upper_[j];
    if (lo == hi) {
      s = VarState::AtLower;
      x_[j] = lo;
      continue;
    }
    const double d = cost_[j] - column_dot(j, y);
    if (d > kOptimalityTol) {
      if (!finite(lo)) return false;
      s = VarState::AtLower;
    } else if (d < -kOptimalityTol) {
      if (!finite(hi)) return false;
      s = VarState::AtUpper;
    } else if (s == VarState::AtUpper && finite(hi)) {
      s = VarState::AtUpper;
    } else if (finite(lo)) {
      s = VarState::AtLower;
    } else if (finite(hi)) {
      s = VarState::AtUpper;
    } else {
      s = VarState::FreeZero;
    }
    x_[j] = s == VarState::AtLower ? lo : s == VarState::AtUpper ? hi : 0.0;
  }
  compute_basic_values();
  return true;
}

bool BoundedSimplex::dual() {
  Vector rho;
  Vector y;
  Vector alpha;
  const Index limit = 50 * (rows_ + columns_) + 1000;
  for (Index local = 0;; ++local) {
    if (local > limit) throw Error("dual simplex did not converge");

    Index leave_row = -1;
    double worst = kFeasibilityTol;
    for (Index r = 0; r < rows_; ++r) {
      const Index col = basic_[static_cast<std::size_t>(r)];
      const double v = std::max(lower_[col] - x_[col], x_[col] - upper_[col]);
      if (v > worst + kTieTol ||
          (leave_row >= 0 && std::abs(v - worst) <= kTieTol &&
           col < basic_[static_cast<std::size_t>(leave_row)])) {
        worst = v;
        leave_row = r;
      }
    }
    if (leave_row < 0) return true;

    const Index leaving = basic_[static_cast<std::size_t>(leave_row)];
    const bool below = x_[leaving] < lower_[leaving];
    const double target = below ? lower_[leaving] : upper_[leaving];

    rho = Vector::Unit(rows_, leave_row);
    factor_.btran(rho);
    y = basic_costs(cost_);
    factor_.btran(y);

    Index entering = -1;
    double best_ratio = kInfinity;
    double best_alpha = 0.0;
    for (Index j = 0; j < columns_; ++j) {
      const VarState s = state_[static_cast<std::size_t>(j)];
      if (s == VarState::Basic || lower_[j] == upper_[j]) continue;
      const double arj = column_dot(j, rho);
      if (std::abs(arj) <= kPivotTol) continue;
      // x_leaving changes by -arj per unit increase of x_j.
      bool eligible;
      if (below) {
        eligible = (s == VarState::AtLower && arj < 0) || (s == VarState::AtUpper && arj > 0) ||
                   s == VarState::FreeZero;
      } else {
        eligible = (s == VarState::AtLower && arj > 0) || (s == VarState::AtUpper && arj < 0) ||
                   s == VarState::FreeZero;
      }
      if (!eligible) continue;
      const double d = cost_[j] - column_dot(j, y);
      const double ratio = std::abs(d) / std::abs(arj);
      if (ratio < best_ratio - kTieTol ||
          (std::abs(ratio - best_ratio) <= kTieTol && std::abs(arj) > best_alpha)) {
        best_ratio = ratio;
        best_alpha = std::abs(arj);
        entering = j;
      }
    }
    if (entering < 0) return false;

    load_column(entering, alpha);
    factor_.ftran(alpha);
    const double step = (x_[leaving] - target) / alpha[leave_row];
    bump_iteration("dual", entering, leaving);
    pivot(leave_row, entering, alpha, step);
  }
}

LpStatus BoundedSimplex::reoptimize(const Vector& lower, const Vector& upper) {
  lower_.head(structural_) = lower;
  upper_.head(structural_) = upper;
  if (!has_basis_ || !prepare_dual_start()) return solve();
  try {
    if (!dual()) return LpStatus::Infeasible;
  } catch (const Error&) {
    return solve();
  }
  return primal(cost_) == PrimalResult::Optimal ? LpStatus::Optimal : LpStatus::Unbounded;
}

LpSolution BoundedSimplex::solution(LpStatus status) const {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  const Index ineq_rows = rows_ - eq_rows_;
  sol.x = x_.head(structural_);
  sol.objective = cost_.head(structural_).dot(sol.x);
  sol.eq_duals = Vector::Zero(eq_rows_);
  sol.ineq_duals = Vector::Zero(ineq_rows);
  sol.lower_duals = Vector::Zero(structural_);
  sol.upper_duals = Vector::Zero(structural_);
  if (status != LpStatus::Optimal) return sol;

  Vector y = basic_costs(cost_);
  factor_.btran(y);
  sol.eq_duals = -y.head(eq_rows_);
  for (Index k = 0; k < ineq_rows; ++k) {
    const bool slack_basic =
        state_[static_cast<std::size_t>(first_slack_ + k)] == VarState::Basic;
    sol.ineq_duals[k] = slack_basic ? 0.0 : -y[eq_rows_ + k];
  }
  for (Index j = 0; j < structural_; ++j) {
    if (state_[static_cast<std::size_t>(j)] == VarState::Basic) continue;
    const double d = cost_[j] - column_dot(j, y);
    if (d > 0) {
      sol.lower_duals[j] = d;
    } else {
      sol.upper_duals[j] = -d;
    }
  }
  return sol;
}

}  // namespace dayahead::detail
