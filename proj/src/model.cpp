#include "dlqg/model.hpp"

#include <string>

#include "dlqg/errors.hpp"
#include "dlqg/linalg.hpp"

namespace dlqg {

namespace {

std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_sequence(const std::vector<MatrixXd>& seq, const char* name, std::size_t count,
                    Eigen::Index rows, Eigen::Index cols) {
  if (seq.size() != count) {
    throw DimensionMismatch(std::string(name) + ": expected " + std::to_string(count) +
                            " matrices, got " + std::to_string(seq.size()));
  }
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (seq[t].rows() != rows || seq[t].cols() != cols) {
      throw DimensionMismatch(std::string(name) + "[t=" + std::to_string(t) + "]: expected " +
                              shape_str(rows, cols) + ", got " +
                              shape_str(seq[t].rows(), seq[t].cols()));
    }
  }
}

void check_definite(std::vector<MatrixXd>& seq, const char* name, bool strict) {
  for (std::size_t t = 0; t < seq.size(); ++t) {
    seq[t] = symmetrize(seq[t]);
    const double lo = min_eigenvalue(seq[t]);
    const bool ok = strict ? lo > kPdTol : lo >= -kPsdTol;
    if (!ok) throw NotDefinite(strict, name, static_cast<int>(t), lo);
  }
}

// Places `blocks` on the diagonal of a (rows x cols) zero matrix, starting at
// block offset (row0, col0).
MatrixXd block_diag(const std::vector<MatrixXd>& blocks, Eigen::Index rows, Eigen::Index cols,
                    Eigen::Index row0 = 0, Eigen::Index col0 = 0) {
  MatrixXd out = MatrixXd::Zero(rows, cols);
  Eigen::Index r = row0, c = col0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace

SystemData validate_system_data(SystemData raw) {
  if (raw.horizon < 1) throw DimensionMismatch("horizon must be a positive integer");
  if (raw.n < 1 || raw.m < 1 || raw.p < 1) {
    throw DimensionMismatch("dims n, m, p must be positive integers");
  }
  const auto N = static_cast<std::size_t>(raw.horizon);
  check_sequence(raw.A, "A", N, raw.n, raw.n);
  check_sequence(raw.B, "B", N, raw.n, raw.m);
  check_sequence(raw.C, "C", N, raw.p, raw.n);
  check_sequence(raw.M, "M", N + 1, raw.n, raw.n);
  check_sequence(raw.R, "R", N, raw.m, raw.m);
  check_sequence(raw.SigmaW, "SigmaW", N, raw.n, raw.n);
  check_sequence(raw.SigmaV, "SigmaV", N, raw.p, raw.p);
  if (raw.Sigma0.rows() != raw.n || raw.Sigma0.cols() != raw.n) {
    throw DimensionMismatch("Sigma0: expected " + shape_str(raw.n, raw.n) + ", got " +
                            shape_str(raw.Sigma0.rows(), raw.Sigma0.cols()));
  }
  if (raw.mu0.size() != raw.n) {
    throw DimensionMismatch("mu0: expected length " + std::to_string(raw.n) + ", got " +
                            std::to_string(raw.mu0.size()));
  }

  check_definite(raw.M, "M", false);
  check_definite(raw.R, "R", true);
  check_definite(raw.SigmaW, "SigmaW", false);
  check_definite(raw.SigmaV, "SigmaV", true);
  raw.Sigma0 = symmetrize(raw.Sigma0);
  const double lo = min_eigenvalue(raw.Sigma0);
  if (lo < -kPsdTol) throw NotDefinite(false, "Sigma0", -1, lo);
  return raw;
}

CompactSystem assemble_compact(const SystemData& sys) {
  CompactSystem cs;
  const int N = sys.horizon, n = sys.n, m = sys.m, p = sys.p;
  cs.horizon = N;
  cs.n = n;
  cs.m = m;
  cs.p = p;
  const Eigen::Index nx = cs.state_dim(), nu = cs.input_dim(), ny = cs.output_dim();

  // A_N never enters the dynamics (it is annihilated by the shift).
  std::vector<MatrixXd> a_blocks = sys.A;
  a_blocks.push_back(MatrixXd::Zero(n, n));
  cs.A = block_diag(a_blocks, nx, nx);
  cs.B = block_diag(sys.B, nx, nu);
  cs.C = block_diag(sys.C, ny, nx);
  cs.Z = MatrixXd::Zero(nx, nx);
  cs.Z.bottomLeftCorner(n * N, n * N).setIdentity();

  // Forward block substitution: P11(i, j) = A_{i-1} ... A_j for i > j.
  cs.P11 = MatrixXd::Zero(nx, nx);
  for (int j = 0; j <= N; ++j) {
    cs.P11.block(j * n, j * n, n, n).setIdentity();
    for (int i = j + 1; i <= N; ++i) {
      cs.P11.block(i * n, j * n, n, n) = sys.A[i - 1] * cs.P11.block((i - 1) * n, j * n, n, n);
    }
  }
  cs.P12 = cs.P11 * (cs.Z * cs.B);

  cs.M = block_diag(sys.M, nx, nx);
  cs.R = block_diag(sys.R, nu, nu);
  std::vector<MatrixXd> w_blocks{sys.Sigma0};
  w_blocks.insert(w_blocks.end(), sys.SigmaW.begin(), sys.SigmaW.end());
  cs.Sigma_w = block_diag(w_blocks, nx, nx);
  cs.Sigma_v = block_diag(sys.SigmaV, ny, ny);
  cs.mu_w = VectorXd::Zero(nx);
  cs.mu_w.head(n) = sys.mu0;
  cs.G = cs.C * cs.P12;

  cs.M_half = symmetric_sqrt(cs.M);
  cs.R_half = symmetric_sqrt(cs.R);
  cs.Sigma_w_half = symmetric_sqrt(cs.Sigma_w);
  cs.Sigma_v_half = symmetric_sqrt(cs.Sigma_v);

  const MatrixXd second_moment = cs.Sigma_w + cs.mu_w * cs.mu_w.transpose();
  const MatrixXd X = cs.P11 * second_moment * cs.P11.transpose();
  cs.R_tilde = symmetrize(cs.R + cs.P12.transpose() * cs.M * cs.P12);
  cs.W_tilde = symmetrize(cs.Sigma_v + cs.C * X * cs.C.transpose());
  cs.L_tilde = cs.P12.transpose() * cs.M * X * cs.C.transpose();
  cs.open_loop_cost = (cs.M * X).trace();
  return cs;
}

void require_causal_controller(const CompactSystem& cs, const MatrixXd& K) {
  if (K.rows() != cs.input_dim() || K.cols() != cs.output_dim()) {
    throw DimensionMismatch("controller must be " + shape_str(cs.input_dim(), cs.output_dim()) +
                            ", got " + shape_str(K.rows(), K.cols()));
  }
  if (!is_block_causal(K, cs.m, cs.p)) {
    throw NonCausalController("controller has a nonzero entry above the block diagonal");
  }
}

ClosedLoopMap::ClosedLoopMap(const CompactSystem& cs, const MatrixXd& K) : C_(cs.C) {
  require_causal_controller(cs, K);
  const MatrixXd loop = nilpotent_inverse(cs.P12 * K * cs.C, cs.horizon);
  x_w_ = loop * cs.P11;
  x_v_ = loop * cs.P12 * K;
  // u = K y = K (C x + v)
  u_w_ = K * cs.C * x_w_;
  u_v_ = K * (cs.C * x_v_ + MatrixXd::Identity(cs.output_dim(), cs.output_dim()));
}

Trajectories ClosedLoopMap::apply(const VectorXd& w, const VectorXd& v) const {
  Trajectories tr;
  tr.x = x_w_ * w + x_v_ * v;
  tr.y = C_ * tr.x + v;
  tr.u = u_w_ * w + u_v_ * v;
  return tr;
}

Trajectories closed_loop_trajectories(const CompactSystem& cs, const MatrixXd& K,
                                      const VectorXd& w, const VectorXd& v) {
  if (w.size() != cs.state_dim() || v.size() != cs.output_dim()) {
    throw DimensionMismatch("noise vectors must have lengths n(N+1) and pN");
  }
  return ClosedLoopMap(cs, K).apply(w, v);
}

}  // namespace dlqg
