#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace dayahead {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete case file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A case that parses but breaks a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Network graph is not connected, so the reduced susceptance is singular.
class DisconnectedNetworkError : public Error {
 public:
  using Error::Error;
};

/// No feasible schedule or dispatch exists.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A pricing construction whose linear system is not square or not solvable.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Branch-and-bound exhausted its node budget before proving optimality.
class NodeLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace dayahead
