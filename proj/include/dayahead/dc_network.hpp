#pragma once

#include "dayahead/common.hpp"
#include "dayahead/grid_model.hpp"

#include <Eigen/Cholesky>

#include <iosfwd>
#include <vector>

namespace dayahead {

/// Bus susceptance matrix B (bus_count x bus_count, per unit).
template <typename Scalar = double>
struct SusceptanceMatrix {
  MatrixX<Scalar> entries;
};

/// B with the slack row and column removed, factored once for reuse.
template <typename Scalar = double>
struct ReducedSusceptance {
  MatrixX<Scalar> entries;
  BusId slack;
  Eigen::LLT<MatrixX<Scalar>> factor;
};

/// Branch-bus incidence scaled by line susceptance; row l gives
/// f_l = b_l (theta_from - theta_to).
template <typename Scalar = double>
struct LineFlowMatrix {
  MatrixX<Scalar> entries;
};

/// Shift factors: flow on each line per MW injected at each bus and withdrawn
/// at the slack. The slack column is identically zero.
template <typename Scalar = double>
struct PtdfMatrix {
  MatrixX<Scalar> entries;
  BusId slack;

  Index line_count() const { return entries.rows(); }
  Index bus_count() const { return entries.cols(); }
  Scalar operator()(Index line, Index bus) const { return entries(line, bus); }
};

template <typename Scalar = double>
SusceptanceMatrix<Scalar> build_susceptance(const GridCase& grid) {
  const Index n = grid.bus_count();
  MatrixX<Scalar> b = MatrixX<Scalar>::Zero(n, n);
  for (const LineSpec& line : grid.lines) {
    const Scalar s = static_cast<Scalar>(grid.line_susceptance(line));
    const Index i = line.from_bus.position();
    const Index j = line.to_bus.position();
    b(i, i) += s;
    b(j, j) += s;
    b(i, j) -= s;
    b(j, i) -= s;
  }
  return {std::move(b)};
}

namespace detail {

std::vector<Index> non_slack_positions(Index bus_count, BusId slack);
bool pattern_connected(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adjacency);

}  // namespace detail

/// Throws DisconnectedNetworkError when the network behind `b` is not
/// connected or the reduced matrix is numerically singular.
template <typename Scalar = double>
ReducedSusceptance<Scalar> reduce_slack(const SusceptanceMatrix<Scalar>& b, BusId slack) {
  const Index n = b.entries.rows();
  if (slack.index < 1 || slack.index > n) {
    throw DisconnectedNetworkError("slack bus " + std::to_string(slack.index) +
                                   " outside the network");
  }
  if (!detail::pattern_connected((b.entries.array() != Scalar(0)).matrix())) {
    throw DisconnectedNetworkError("network is disconnected; reduced susceptance is singular");
  }
  const std::vector<Index> keep = detail::non_slack_positions(n, slack);
  MatrixX<Scalar> reduced = b.entries(keep, keep);
  ReducedSusceptance<Scalar> out{reduced, slack, Eigen::LLT<MatrixX<Scalar>>()};
  if (reduced.size() > 0) {
    out.factor.compute(reduced);
    if (out.factor.info() != Eigen::Success) {
      throw DisconnectedNetworkError("reduced susceptance is not positive definite");
    }
  }
  return out;
}

template <typename Scalar = double>
LineFlowMatrix<Scalar> build_line_matrix(const GridCase& grid) {
  MatrixX<Scalar> x = MatrixX<Scalar>::Zero(grid.line_count(), grid.bus_count());
  for (Index l = 0; l < grid.line_count(); ++l) {
    const LineSpec& line = grid.lines[static_cast<std::size_t>(l)];
    const Scalar s = static_cast<Scalar>(grid.line_susceptance(line));
    x(l, line.from_bus.position()) += s;
    x(l, line.to_bus.position()) -= s;
  }
  return {std::move(x)};
}

/// T = X * [B'^-1 0; 0 0], with B'^-1 scattered back onto non-slack positions.
template <typename Scalar = double>
PtdfMatrix<Scalar> compute_ptdf(const LineFlowMatrix<Scalar>& x,
                                const ReducedSusceptance<Scalar>& b_red, BusId slack) {
  const Index n = x.entries.cols();
  const std::vector<Index> keep = detail::non_slack_positions(n, slack);
  // Only the non-slack columns of X meet a nonzero block of the padded inverse.
  const MatrixX<Scalar> x_keep = x.entries(Eigen::all, keep);
  MatrixX<Scalar> t = MatrixX<Scalar>::Zero(x.entries.rows(), n);
  if (!keep.empty()) {
    // X_keep * B'^-1 = (B'^-1 X_keep^T)^T since B' is symmetric.
    const MatrixX<Scalar> solved = b_red.factor.solve(x_keep.transpose()).transpose();
    if (!solved.allFinite()) throw DisconnectedNetworkError("PTDF computation is singular");
    t(Eigen::all, keep) = solved;
  }
  return {std::move(t), slack};
}

/// Flows (MW) induced by a net injection vector; the slack absorbs any imbalance.
template <typename Scalar, typename Derived>
VectorX<Scalar> line_flows(const PtdfMatrix<Scalar>& t, const Eigen::MatrixBase<Derived>& injection) {
  return t.entries * injection;
}

/// All network matrices for one case.
template <typename Scalar = double>
struct DcNetwork {
  SusceptanceMatrix<Scalar> susceptance;
  ReducedSusceptance<Scalar> reduced;
  LineFlowMatrix<Scalar> line_matrix;
  PtdfMatrix<Scalar> ptdf;
};

template <typename Scalar = double>
DcNetwork<Scalar> build_network(const GridCase& grid) {
  auto b = build_susceptance<Scalar>(grid);
  auto reduced = reduce_slack(b, grid.slack_bus);
  auto x = build_line_matrix<Scalar>(grid);
  auto t = compute_ptdf(x, reduced, grid.slack_bus);
  return {std::move(b), std::move(reduced), std::move(x), std::move(t)};
}

/// CSV with one row per matrix row, 12 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& m);

/// Writes B.csv, B_reduced.csv, X.csv and T.csv into `dir`.
void dump_network_csv(const DcNetwork<double>& network, const std::string& dir);

}  // namespace dayahead
