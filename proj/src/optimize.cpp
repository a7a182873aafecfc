#include "dlqg/optimize.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "dlqg/cost.hpp"
#include "dlqg/errors.hpp"

namespace dlqg {

void OptimizerConfig::validate() const {
  if (!(0.0 < c1 && c1 < c2 && c2 < 1.0)) {
    throw std::invalid_argument("Wolfe constants must satisfy 0 < c1 < c2 < 1");
  }
  if (!(stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (max_bisect < 1) throw std::invalid_argument("max_bisect must be >= 1");
  if (!(init_range >= 0.0)) throw std::invalid_argument("init_range must be >= 0");
}

LineSearchResult wolfe_bisection(const LineFunction& phi, double phi0, double dphi0, double c1,
                                 double c2, int max_bisect, double initial_step) {
  if (!(dphi0 < 0.0)) throw NotDescent(dphi0);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double eta = initial_step > 0.0 && std::isfinite(initial_step) ? initial_step : 1.0;
  LineSearchResult res;
  for (int k = 0; k < max_bisect; ++k) {
    const auto [value, slope] = phi(eta);
    ++res.evaluations;
    if (!(value <= phi0 + c1 * eta * dphi0)) {
      hi = eta;
      eta = 0.5 * (lo + hi);
    } else if (slope < c2 * dphi0) {
      lo = eta;
      eta = std::isinf(hi) ? 2.0 * eta : 0.5 * (lo + hi);
    } else {
      res.step = eta;
      res.value = value;
      res.slope = slope;
      return res;
    }
  }
  throw LineSearchStall("no Wolfe step found in " + std::to_string(max_bisect) +
                        " trials (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "])");
}

LineSearchResult wolfe_bisection(const LineFunction& phi, double c1, double c2, int max_bisect,
                                 double initial_step) {
  const auto [phi0, dphi0] = phi(0.0);
  return wolfe_bisection(phi, phi0, dphi0, c1, c2, max_bisect, initial_step);
}

MatrixXd random_init(const SubspaceSpec& spec, double range, std::uint64_t seed) {
  if (range < 0.0) throw std::invalid_argument("random_init: range must be >= 0");
  VectorXd alpha = VectorXd::Zero(spec.dim());
  if (range > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-range, range);
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
      // Scale so the largest entry tied to coordinate i is the uniform draw.
      const double peak = spec.basis.col(i).cwiseAbs().maxCoeff();
      alpha(i) = uniform(rng) / peak;
    }
  }
  return from_coordinates(alpha, spec);
}

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::QiGlobal: return "QI_GLOBAL";
    case Certificate::UsGlobal: return "US_GLOBAL";
    case Certificate::StationaryOnly: return "STATIONARY_ONLY";
  }
  return "STATIONARY_ONLY";
}

std::optional<Certificate> certificate_from_string(const std::string& s) {
  for (auto c : {Certificate::QiGlobal, Certificate::UsGlobal, Certificate::StationaryOnly}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

SynthesisReport projected_gradient_descent(const CompactSystem& cs, const SubspaceSpec& spec,
                                           const MatrixXd& K0, const OptimizerConfig& cfg,
                                           const std::optional<USCertificate>& us) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  SynthesisReport report;
  report.seed = cfg.seed;

  MatrixXd K = project(K0, spec);
  double J = cost_k(cs, K);
  report.cost_trace.push_back(J);

  MatrixXd K_prev, D_prev;
  double last_step = 1.0;
  MatrixXd D = project(grad_k(cs, K), spec);
  int it = 0;
  for (;; ++it) {
    report.residual = D.size() ? D.cwiseAbs().maxCoeff() : 0.0;
    if (report.residual < cfg.stop_tol) {
      report.converged = true;
      break;
    }
    if (it >= cfg.max_iters) break;

    double trial = last_step;
    if (K_prev.size()) {
      const double sy = (K - K_prev).cwiseProduct(D - D_prev).sum();
      if (sy > 0.0) trial = (K - K_prev).squaredNorm() / sy;
    }
    // phi'(eta) uses the projected gradient, i.e. the restricted cost alpha -> J(B alpha).
    MatrixXd trial_grad;
    const LineFunction phi = [&](double eta) {
      const MatrixXd Kt = K - eta * D;
      trial_grad = project(grad_k(cs, Kt), spec);
      return std::make_pair(cost_k(cs, Kt), -trial_grad.cwiseProduct(D).sum());
    };
    LineSearchResult ls;
    try {
      ls = wolfe_bisection(phi, J, -D.squaredNorm(), cfg.c1, cfg.c2, cfg.max_bisect, trial);
    } catch (const Error& e) {
      throw OptimizationError(e, K, it);
    }
    last_step = ls.step;
    K_prev = K;
    D_prev = D;
    K = K - ls.step * D;
    J = ls.value;
    D = trial_grad;  // gradient at the accepted step was the last evaluated
    if (report.cost_trace.size() < kFullTraceLength || (it + 1) % 10 == 0) {
      report.cost_trace.push_back(J);
    }
  }
  if (report.cost_trace.size() > kFullTraceLength) report.trace_stride = 10;

  report.K = K;
  report.J = J;
  report.iterations = it;
  if (report.converged) {
    if (spec.kind == SubspaceKind::Sparsity && spec.pattern &&
        qi_test_binary(*spec.pattern, binary_delta(cs.G))) {
      report.certificate = Certificate::QiGlobal;
    } else if (us && us->certifies_us()) {
      report.certificate = Certificate::UsGlobal;
    } else {
      report.certificate = Certificate::StationaryOnly;
    }
  }
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

MultiStartResult multi_start(const CompactSystem& cs, const SubspaceSpec& spec,
                             const OptimizerConfig& cfg, int starts, int jobs,
                             const std::optional<USCertificate>& us) {
  if (starts < 1) throw std::invalid_argument("multi_start: starts must be >= 1");
  cfg.validate();
  MultiStartResult result;
  result.runs.resize(static_cast<std::size_t>(starts));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(starts));

  auto run = [&](int i) {
    try {
      OptimizerConfig local = cfg;
      local.seed = cfg.seed + static_cast<std::uint64_t>(i);
      const MatrixXd K0 = random_init(spec, local.init_range, local.seed);
      result.runs[static_cast<std::size_t>(i)] = projected_gradient_descent(cs, spec, K0, local, us);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };

  const int workers = std::max(1, std::min(jobs, starts));
  if (workers == 1) {
    for (int i = 0; i < starts; ++i) run(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < starts; i = next++) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 1; i < result.runs.size(); ++i) {
    if (result.runs[i].J < result.runs[result.best].J) result.best = i;
  }
  return result;
}

}  // namespace dlqg
