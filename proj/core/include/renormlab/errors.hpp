#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace renormlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree (point vs. expression, chart vs. expression, ...).
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A computation produced a non-finite value. Never silently turned into NaN.
class NumericError : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Text input (expression, domain, config) could not be parsed.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// The Zalcman selection ran out of budget before certifying a point.
class SelectionIncomplete : public Error {
public:
  SelectionIncomplete(const std::string& what, Eigen::VectorXd best, long step = -1);
  const Eigen::VectorXd& best_candidate() const noexcept { return best_; }
  long step() const noexcept { return step_; }

private:
  Eigen::VectorXd best_;
  long step_;
};

/// Matrix inversion requested at a point where the matrix is (numerically) singular.
class SingularMatrixError : public NumericError {
public:
  SingularMatrixError(const std::string& what, double det_abs);
  double determinant_magnitude() const noexcept { return det_abs_; }

private:
  double det_abs_;
};

}  // namespace renormlab
