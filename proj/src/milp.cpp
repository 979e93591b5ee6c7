#include "dayahead/milp.hpp"

#include "simplex.hpp"

#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>

namespace dayahead {

std::string_view to_string(MilpStatus status) {
  return status == MilpStatus::Optimal ? "optimal" : "infeasible";
}

void MixedIntegerProgram::check_well_formed() const {
  lp.check_well_formed();
  for (Index j : binary_vars) {
    if (j < 0 || j >= lp.variable_count()) {
      throw std::invalid_argument("binary index " + std::to_string(j) + " out of range");
    }
    if (lp.lower[j] < 0.0 || lp.upper[j] > 1.0) {
      throw std::invalid_argument("binary variable " + std::to_string(j) +
                                  " has bounds outside [0, 1]");
    }
  }
}

namespace {

struct Node {
  double bound;
  std::size_t order;
  Vector lower;
  Vector upper;
  detail::Basis basis;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.order > b.order;
  }
};

}  // namespace

MilpSolution solve_milp(const MixedIntegerProgram& mip, const MilpOptions& options) {
  mip.check_well_formed();
  const LinearProgram& lp = mip.lp;
  MilpSolution result;

  detail::BoundedSimplex engine(lp, options.simplex);
  // Binaries with identical bounds are already fixed; branching skips them.
  std::vector<Index> free_binaries;
  Vector root_lower = lp.lower;
  Vector root_upper = lp.upper;
  for (Index j : mip.binary_vars) {
    root_lower[j] = std::ceil(root_lower[j] - options.integrality_tol);
    root_upper[j] = std::floor(root_upper[j] + options.integrality_tol);
    if (root_lower[j] > root_upper[j]) return result;
    if (root_lower[j] < root_upper[j]) free_binaries.push_back(j);
  }

  auto fathomed = [&](double bound, double incumbent) {
    return bound >= incumbent - options.fathom_tol * std::max(1.0, std::abs(incumbent));
  };

  std::priority_queue<Node, std::vector<Node>, WorseNode> open;
  std::size_t created = 0;
  double incumbent = kInfinity;
  bool root = true;
  open.push(Node{-kInfinity, created++, root_lower, root_upper, {}});

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (fathomed(node.bound, incumbent)) continue;
    if (result.nodes_explored >= options.max_nodes) {
      throw NodeLimitError("branch and bound reached " + std::to_string(options.max_nodes) +
                           " nodes without closing the search");
    }
    ++result.nodes_explored;

    // The root has no basis yet, so reoptimize falls through to a cold start.
    if (!root) engine.load_basis(node.basis);
    const LpStatus status = engine.reoptimize(node.lower, node.upper);
    if (status == LpStatus::Unbounded) {
      throw Error("MILP relaxation is unbounded");
    }
    if (status != LpStatus::Optimal) {
      root = false;
      continue;
    }
    const LpSolution sol = engine.solution(status);
    if (root) {
      result.root_bound = sol.objective;
      root = false;
    }
    if (fathomed(sol.objective, incumbent)) continue;

    Index branch = -1;
    double best_distance = 0.5 + 1.0;
    for (Index j : free_binaries) {
      if (node.lower[j] == node.upper[j]) continue;
      const double frac = sol.x[j] - std::floor(sol.x[j]);
      if (frac <= options.integrality_tol || frac >= 1.0 - options.integrality_tol) continue;
      const double distance = std::abs(frac - 0.5);
      if (distance < best_distance) {
        best_distance = distance;
        branch = j;
      }
    }
    if (branch < 0) {
      incumbent = sol.objective;
      result.status = MilpStatus::Optimal;
      result.objective = sol.objective;
      result.x = sol.x;
      continue;
    }

    const detail::Basis basis = engine.basis();
    for (double value : {0.0, 1.0}) {
      Node child{sol.objective, created++, node.lower, node.upper, basis};
      child.lower[branch] = value;
      child.upper[branch] = value;
      open.push(std::move(child));
    }
  }
  return result;
}

}  // namespace dayahead
