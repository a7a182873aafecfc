#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dlqg/model.hpp"
#include "dlqg/subspace.hpp"
#include "dlqg/ustest.hpp"

namespace dlqg {

struct OptimizerConfig {
  double c1 = 1e-4;
  double c2 = 0.9;
  double stop_tol = 5e-5;
  int max_iters = 5000;
  int max_bisect = 64;
  double init_range = 10.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void validate() const;
};

// phi(eta) and phi'(eta) along a search ray.
using LineFunction = std::function<std::pair<double, double>(double)>;

struct LineSearchResult {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
  int evaluations = 0;
};

// Bracketing expansion and bisection for a step satisfying
//   phi(eta) <= phi(0) + c1 eta phi'(0)   and   phi'(eta) >= c2 phi'(0).
// Throws NotDescent if phi'(0) >= 0, LineSearchStall after max_bisect trials.
LineSearchResult wolfe_bisection(const LineFunction& phi, double phi0, double dphi0, double c1,
                                 double c2, int max_bisect, double initial_step = 1.0);
LineSearchResult wolfe_bisection(const LineFunction& phi, double c1, double c2, int max_bisect,
                                 double initial_step = 1.0);

// Free coordinates i.i.d. uniform on [-range, range] in entry units; zero
// off the subspace.
MatrixXd random_init(const SubspaceSpec& spec, double range, std::uint64_t seed);

enum class Certificate { QiGlobal, UsGlobal, StationaryOnly };

std::string to_string(Certificate c);
std::optional<Certificate> certificate_from_string(const std::string& s);

struct SynthesisReport {
  MatrixXd K;
  double J = 0.0;
  double residual = 0.0;  // max-abs projected gradient at K
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;
  int trace_stride = 1;  // trace keeps every stride-th entry past kFullTraceLength
  std::optional<Certificate> certificate;  // set only when converged
  double wall_time = 0.0;                  // seconds
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kFullTraceLength = 10000;

// K_{t+1} = K_t - eta_t project(grad J(K_t)) with Wolfe steps. The trial step
// of each line search is the Barzilai-Borwein step of the previous iterate pair.
// Throws OptimizationError wrapping line-search failures.
SynthesisReport projected_gradient_descent(const CompactSystem& cs, const SubspaceSpec& spec,
                                           const MatrixXd& K0, const OptimizerConfig& cfg,
                                           const std::optional<USCertificate>& us = std::nullopt);

struct MultiStartResult {
  std::vector<SynthesisReport> runs;  // in seed order
  std::size_t best = 0;
};

// Start i uses seed cfg.seed + i. Results are independent of `jobs`.
MultiStartResult multi_start(const CompactSystem& cs, const SubspaceSpec& spec,
                             const OptimizerConfig& cfg, int starts, int jobs = 1,
                             const std::optional<USCertificate>& us = std::nullopt);

}  // namespace dlqg
