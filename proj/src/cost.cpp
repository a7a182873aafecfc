#include "dlqg/cost.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "dlqg/errors.hpp"
#include "dlqg/linalg.hpp"

namespace dlqg {

namespace {

constexpr long kChunkSize = 2048;

void require_causal_q(const CompactSystem& cs, const MatrixXd& Q) {
  // Same shape and causality contract as a controller.
  require_causal_controller(cs, Q);
}

MatrixXd masked_causal(const CompactSystem& cs, const MatrixXd& X) {
  return X.cwiseProduct(causal_mask(X.rows(), X.cols(), cs.m, cs.p));
}

// Unmasked gradient of J~ at Q.
MatrixXd full_grad_q(const CompactSystem& cs, const MatrixXd& Q) {
  return 2.0 * (cs.R_tilde * Q * cs.W_tilde + cs.L_tilde);
}

struct ChunkStats {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from mean
};

}  // namespace

double cost_k(const CompactSystem& cs, const MatrixXd& K) {
  require_causal_controller(cs, K);
  const int N = cs.horizon;
  const MatrixXd state_loop = nilpotent_inverse(cs.P12 * K * cs.C, N);  // (I - P12 K C)^{-1}
  const MatrixXd output_loop = nilpotent_inverse(cs.G * K, N);          // (I - C P12 K)^{-1}
  const MatrixXd x_from_w = state_loop * cs.P11;
  const MatrixXd K_loop = K * output_loop;
  const MatrixXd u_from_w = K_loop * cs.C * cs.P11;

  return (cs.M_half * x_from_w * cs.Sigma_w_half).squaredNorm() +
         (cs.M_half * cs.P12 * K_loop * cs.Sigma_v_half).squaredNorm() +
         (cs.R_half * u_from_w * cs.Sigma_w_half).squaredNorm() +
         (cs.R_half * K_loop * cs.Sigma_v_half).squaredNorm() +
         (cs.M_half * x_from_w * cs.mu_w).squaredNorm() +
         (cs.R_half * u_from_w * cs.mu_w).squaredNorm();
}

double cost_q(const CompactSystem& cs, const MatrixXd& Q) {
  require_causal_q(cs, Q);
  const MatrixXd I = MatrixXd::Identity(cs.state_dim(), cs.state_dim());
  const MatrixXd x_from_w = (I + cs.P12 * Q * cs.C) * cs.P11;
  const MatrixXd u_from_w = Q * cs.C * cs.P11;

  return (cs.M_half * x_from_w * cs.Sigma_w_half).squaredNorm() +
         (cs.M_half * cs.P12 * Q * cs.Sigma_v_half).squaredNorm() +
         (cs.R_half * u_from_w * cs.Sigma_w_half).squaredNorm() +
         (cs.R_half * Q * cs.Sigma_v_half).squaredNorm() +
         (cs.R_half * u_from_w * cs.mu_w).squaredNorm() +
         (cs.M_half * x_from_w * cs.mu_w).squaredNorm();
}

MatrixXd h_map(const MatrixXd& Q, const MatrixXd& G, int horizon) {
  return nilpotent_inverse(-Q * G, horizon) * Q;
}

MatrixXd h_inv(const MatrixXd& K, const MatrixXd& G, int horizon) {
  return nilpotent_inverse(K * G, horizon) * K;
}

VectorXd QuadraticForm::restrict(const MatrixXd& Q) const {
  VectorXd q(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t a = 0; a < coords.size(); ++a) q(static_cast<Eigen::Index>(a)) = Q.data()[coords[a]];
  return q;
}

MatrixXd QuadraticForm::expand(const VectorXd& q) const {
  MatrixXd Q = MatrixXd::Zero(rows, cols);
  for (std::size_t a = 0; a < coords.size(); ++a) Q.data()[coords[a]] = q(static_cast<Eigen::Index>(a));
  return Q;
}

QuadraticForm quadratic_form(const CompactSystem& cs) {
  QuadraticForm qf;
  qf.rows = cs.input_dim();
  qf.cols = cs.output_dim();
  std::vector<Eigen::Index> row_of, col_of;
  for (Eigen::Index c = 0; c < qf.cols; ++c) {
    for (Eigen::Index r = 0; r < qf.rows; ++r) {
      if (c / cs.p <= r / cs.m) {
        qf.coords.push_back(c * qf.rows + r);
        row_of.push_back(r);
        col_of.push_back(c);
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(qf.coords.size());
  // vec(R~ Q W~) = (W~ (x) R~) vec(Q)
  qf.H.resize(dim, dim);
  qf.g.resize(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      qf.H(a, b) = 2.0 * cs.W_tilde(col_of[a], col_of[b]) * cs.R_tilde(row_of[a], row_of[b]);
    }
    qf.g(b) = 2.0 * cs.L_tilde(row_of[b], col_of[b]);
  }
  qf.c = cs.open_loop_cost;
  return qf;
}

MatrixXd grad_q(const CompactSystem& cs, const MatrixXd& Q) {
  require_causal_q(cs, Q);
  return masked_causal(cs, full_grad_q(cs, Q));
}

MatrixXd grad_k(const CompactSystem& cs, const MatrixXd& K) {
  require_causal_controller(cs, K);
  // J(K) = J~(Q(K)) with Q = (I - K G)^{-1} K, and
  // dQ = (I - K G)^{-1} dK (I - G K)^{-1}.
  const MatrixXd left = nilpotent_inverse(K * cs.G, cs.horizon);
  const MatrixXd right = nilpotent_inverse(cs.G * K, cs.horizon);
  const MatrixXd Q = left * K;
  return masked_causal(cs, left.transpose() * full_grad_q(cs, Q) * right.transpose());
}

MonteCarloEstimate monte_carlo_cost(const CompactSystem& cs, const MatrixXd& K, long samples,
                                    std::uint64_t seed, int jobs) {
  if (samples < 1) throw std::invalid_argument("monte_carlo_cost: samples must be >= 1");
  const ClosedLoopMap loop(cs, K);
  const long chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkStats> stats(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](long chunk) {
    const long begin = chunk * kChunkSize;
    const long count = std::min(kChunkSize, samples - begin);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    MatrixXd xi_w(cs.state_dim(), count), xi_v(cs.output_dim(), count);
    for (long s = 0; s < count; ++s) {
      for (Eigen::Index i = 0; i < xi_w.rows(); ++i) xi_w(i, s) = normal(rng);
      for (Eigen::Index i = 0; i < xi_v.rows(); ++i) xi_v(i, s) = normal(rng);
    }
    const MatrixXd W = (cs.Sigma_w_half * xi_w).colwise() + cs.mu_w;
    const MatrixXd V = cs.Sigma_v_half * xi_v;
    const MatrixXd X = loop.x_from_w() * W + loop.x_from_v() * V;
    const MatrixXd U = loop.u_from_w() * W + loop.u_from_v() * V;
    const VectorXd costs = (X.cwiseProduct(cs.M * X)).colwise().sum().transpose() +
                           (U.cwiseProduct(cs.R * U)).colwise().sum().transpose();
    ChunkStats& st = stats[static_cast<std::size_t>(chunk)];
    st.count = count;
    st.mean = costs.mean();
    st.m2 = (costs.array() - st.mean).square().sum();
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(chunks)));
  if (workers == 1) {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (long c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Chan et al. pairwise combination, always in chunk order.
  ChunkStats total;
  for (const auto& st : stats) {
    if (total.count == 0) {
      total = st;
      continue;
    }
    const long n = total.count + st.count;
    const double delta = st.mean - total.mean;
    total.mean += delta * static_cast<double>(st.count) / static_cast<double>(n);
    total.m2 += st.m2 + delta * delta * static_cast<double>(total.count) *
                            static_cast<double>(st.count) / static_cast<double>(n);
    total.count = n;
  }
  MonteCarloEstimate est;
  est.samples = total.count;
  est.mean = total.mean;
  if (total.count > 1) {
    const double var = total.m2 / static_cast<double>(total.count - 1);
    est.std_error = std::sqrt(var / static_cast<double>(total.count));
  }
  return est;
}

}  // namespace dlqg
