#pragma once

// Bounded-variable revised simplex shared by solve_lp and the branch-and-bound
// search. Not part of the public interface.

#include "dayahead/lp.hpp"

#include <Eigen/SparseLU>

#include <cstdint>
#include <vector>

namespace dayahead::detail {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

struct Basis {
  std::vector<Index> basic;     // column basic in each row
  std::vector<VarState> state;  // per column
};

/// LU of the basis matrix plus a product-form eta file.
class BasisFactor {
 public:
  void factor(const SparseMatrix& a, const std::vector<Index>& basic);
  void ftran(Vector& v) const;  // v <- B^-1 v
  void btran(Vector& v) const;  // v <- B^-T v
  void update(Index row, const Vector& alpha);
  std::size_t eta_count() const { return etas_.size(); }

 private:
  struct Eta {
    Index row;
    Vector alpha;
  };
  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  Index rows_ = 0;
};

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& options);

  /// Cold start: slack/artificial basis, phase 1 then phase 2.
  LpStatus solve();

  /// Replace structural bounds and reoptimize from the current basis with the
  /// dual simplex. Falls back to a cold start when the basis is not dual feasible.
  LpStatus reoptimize(const Vector& lower, const Vector& upper);

  Basis basis() const { return {basic_, state_}; }
  void load_basis(const Basis& basis);
  bool has_basis() const { return has_basis_; }

  LpSolution solution(LpStatus status) const;
  Index iterations() const { return iterations_; }

 private:
  enum class PrimalResult { Optimal, Unbounded };

  PrimalResult primal(const Vector& costs);
  bool dual();  // false when primal infeasible
  bool prepare_dual_start();

  void refactor();
  void compute_basic_values();
  Vector basic_costs(const Vector& costs) const;
  double column_dot(Index j, const Vector& y) const;
  void load_column(Index j, Vector& out) const;
  void pivot(Index row, Index entering, const Vector& alpha, double step);
  void bump_iteration(const char* kind, Index entering, Index leaving);

  SimplexOptions options_;
  Index structural_ = 0;
  Index eq_rows_ = 0;
  Index rows_ = 0;
  Index columns_ = 0;
  Index first_slack_ = 0;
  Index first_artificial_ = 0;

  SparseMatrix a_;
  Vector b_;
  Vector cost_;
  Vector lower_;
  Vector upper_;
  Vector x_;
  std::vector<VarState> state_;
  std::vector<Index> basic_;
  BasisFactor factor_;
  bool has_basis_ = false;
  Index iterations_ = 0;
};

}  // namespace dayahead::detail
