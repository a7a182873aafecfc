#include "dlqg/errors.hpp"

#include <sstream>

namespace dlqg {

namespace {

std::string definite_message(bool strict, const std::string& matrix, int t, double eig) {
  std::ostringstream os;
  os << matrix;
  if (t >= 0) os << "[t=" << t << "]";
  os << " is not positive " << (strict ? "definite" : "semidefinite")
     << " (smallest eigenvalue " << eig << ")";
  return os.str();
}

}  // namespace

NotDefinite::NotDefinite(bool strict, std::string matrix, int t, double eigenvalue)
    : Error(strict ? "NotPD" : "NotPSD", definite_message(strict, matrix, t, eigenvalue)),
      matrix_(std::move(matrix)),
      t_(t),
      eigenvalue_(eigenvalue) {}

NotDescent::NotDescent(double slope)
    : Error("NotDescent",
            "line search requires a descent direction, got slope " + std::to_string(slope)),
      slope_(slope) {}

OptimizationError::OptimizationError(const Error& cause, Eigen::MatrixXd iterate, int iteration)
    : Error("OptimizationError", "iteration " + std::to_string(iteration) + ": " + cause.what()),
      cause_kind_(cause.kind()),
      iterate_(std::move(iterate)),
      iteration_(iteration) {}

}  // namespace dlqg
