#ifndef NCDIST_ERRORS_HPP
#define NCDIST_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncdist {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Linear solve hit a pivot below the relative threshold.
struct SingularMatrixError : Error {
  SingularMatrixError(const std::string& what, double pivot_magnitude)
      : Error(what), pivot(pivot_magnitude) {}
  double pivot = 0.0;
};

// Fixed-point iteration exhausted its cap; carries the last residual.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double last_residual, long iterations_done)
      : Error(what), residual(last_residual), iterations(iterations_done) {}
  double residual = 0.0;
  long iterations = 0;
};

// Combinatorial size cap exceeded (Catalan growth).
struct CapError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos) : Error(what), position(pos) {}
  std::size_t position = 0;
};

struct ConfigError : Error {
  using Error::Error;
};

// A rational expression was evaluated at a point where an inner inverse
// does not exist ("r(X_1,...,X_d) not defined").
struct EvaluationError : Error {
  using Error::Error;
};

}  // namespace ncdist

#endif
