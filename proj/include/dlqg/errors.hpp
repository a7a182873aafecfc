#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dlqg {

// Base for every error raised by the library. `kind()` is a stable tag used
// in CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("DimensionMismatch", what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error("ParseError", what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

// Raised when a weight or covariance fails its definiteness requirement.
class NotDefinite : public Error {
 public:
  NotDefinite(bool strict, std::string matrix, int t, double eigenvalue);
  const std::string& matrix() const noexcept { return matrix_; }
  int t() const noexcept { return t_; }
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::string matrix_;
  int t_;
  double eigenvalue_;
};

class NonCausalController : public Error {
 public:
  explicit NonCausalController(const std::string& what) : Error("NonCausalController", what) {}
};

class NonCausalPattern : public Error {
 public:
  explicit NonCausalPattern(const std::string& what) : Error("NonCausalPattern", what) {}
};

class WrongSubspaceKind : public Error {
 public:
  explicit WrongSubspaceKind(const std::string& what) : Error("WrongSubspaceKind", what) {}
};

class NumericallyIndefinite : public Error {
 public:
  explicit NumericallyIndefinite(const std::string& what)
      : Error("NumericallyIndefinite", what) {}
};

class SubspaceEscape : public Error {
 public:
  SubspaceEscape(const std::string& what, double residual)
      : Error("SubspaceEscape", what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NotDescent : public Error {
 public:
  explicit NotDescent(double slope);
  double slope() const noexcept { return slope_; }

 private:
  double slope_;
};

class LineSearchStall : public Error {
 public:
  LineSearchStall(const std::string& what) : Error("LineSearchStall", what) {}
};

// Wraps a line-search failure raised inside the descent loop together with
// the iterate at which it happened.
class OptimizationError : public Error {
 public:
  OptimizationError(const Error& cause, Eigen::MatrixXd iterate, int iteration);
  const std::string& cause_kind() const noexcept { return cause_kind_; }
  const Eigen::MatrixXd& iterate() const noexcept { return iterate_; }
  int iteration() const noexcept { return iteration_; }

 private:
  std::string cause_kind_;
  Eigen::MatrixXd iterate_;
  int iteration_;
};

}  // namespace dlqg
