#pragma once

#include "dayahead/lp.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace dayahead {

struct MixedIntegerProgram {
  LinearProgram lp;
  std::vector<Index> binary_vars;

  /// Throws std::invalid_argument when a binary index is out of range or its
  /// bounds leave [0, 1].
  void check_well_formed() const;
};

enum class MilpStatus { Optimal, Infeasible };

std::string_view to_string(MilpStatus status);

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  double root_bound = 0.0;  // objective of the root LP relaxation
  std::size_t nodes_explored = 0;
};

struct MilpOptions {
  std::size_t max_nodes = 200000;
  double integrality_tol = 1e-6;
  /// Nodes whose bound is within this of the incumbent are fathomed.
  double fathom_tol = 1e-9;
  SimplexOptions simplex;
};

/// Best-first branch and bound on the most fractional binary. Throws
/// NodeLimitError when max_nodes is reached before the search closes.
MilpSolution solve_milp(const MixedIntegerProgram& mip, const MilpOptions& options = {});

}  // namespace dayahead
