#include "renormlab/errors.hpp"

#include <utility>

namespace renormlab {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

SelectionIncomplete::SelectionIncomplete(const std::string& what, Eigen::VectorXd best, long step)
    : Error(step >= 0 ? what + " at step " + std::to_string(step) : what),
      best_(std::move(best)),
      step_(step) {}

SingularMatrixError::SingularMatrixError(const std::string& what, double det_abs)
    : NumericError(what), det_abs_(det_abs) {}

}  // namespace renormlab
