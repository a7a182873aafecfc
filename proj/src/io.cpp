#include "dlqg/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dlqg/errors.hpp"

namespace dlqg {

namespace {

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
}

bool is_numeric_row(const json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); });
}

// A matrix value is a number (1x1) or an array of numeric rows.
bool is_matrix(const json& j) {
  return j.is_number() ||
         (j.is_array() && !j.empty() && std::all_of(j.begin(), j.end(), is_numeric_row));
}

std::vector<MatrixXd> sequence_from_json(const json& doc, const char* key, int count) {
  if (!doc.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  const json& j = doc.at(key);
  if (is_matrix(j)) return std::vector<MatrixXd>(static_cast<std::size_t>(count), matrix_from_json(j, key));
  if (!j.is_array()) throw ParseError(std::string(key) + ": expected a matrix or a list of matrices");
  std::vector<MatrixXd> seq;
  for (std::size_t t = 0; t < j.size(); ++t) {
    seq.push_back(matrix_from_json(j[t], std::string(key) + "[" + std::to_string(t) + "]"));
  }
  return seq;
}

BinaryMatrix binary_from_json(const json& j, const std::string& what) {
  const MatrixXd X = matrix_from_json(j, what);
  if (!((X.array() == 0.0) || (X.array() == 1.0)).all()) {
    throw ParseError(what + ": entries must be 0 or 1");
  }
  return X.cast<int>();
}

int positive_int(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer() || doc.at(key).get<long>() < 1) {
    throw ParseError(std::string("'") + key + "' must be a positive integer");
  }
  return doc.at(key).get<int>();
}

SubspaceSpec subspace_from_json(const json& doc, int m, int p, int N) {
  if (doc.contains("subspace") && doc.contains("sparsity")) {
    throw ParseError("give either 'sparsity' or 'subspace', not both");
  }
  if (doc.contains("subspace")) {
    const json& s = doc.at("subspace");
    if (!s.is_object()) throw ParseError("'subspace' must be an object");
    if (s.contains("static_diag") && s.at("static_diag") == true) {
      return static_diag_subspace(m, p, N);
    }
    if (s.contains("static_pattern")) {
      const BinaryMatrix small = binary_from_json(s.at("static_pattern"), "subspace.static_pattern");
      if (small.rows() != m || small.cols() != p) {
        throw DimensionMismatch("subspace.static_pattern must be " + std::to_string(m) + "x" +
                                std::to_string(p));
      }
      return static_pattern_subspace(small, N);
    }
    if (s.contains("basis")) {
      const json& b = s.at("basis");
      if (!b.is_array()) throw ParseError("subspace.basis must be a list of matrices");
      std::vector<MatrixXd> span;
      for (std::size_t k = 0; k < b.size(); ++k) {
        span.push_back(matrix_from_json(b[k], "subspace.basis[" + std::to_string(k) + "]"));
      }
      return explicit_subspace(span, m, p, N);
    }
    throw ParseError("'subspace' needs one of static_diag, static_pattern, basis");
  }
  if (!doc.contains("sparsity")) return sparsity_subspace(SparsityPattern::make(causal_pattern(m, p, N), m, p, N));

  const json& s = doc.at("sparsity");
  BinaryMatrix S;
  if (s.is_array()) {
    S = binary_from_json(s, "sparsity");
  } else if (s.is_object() && s.contains("explicit")) {
    // Explicit data wins over the kron shorthand.
    S = binary_from_json(s.at("explicit"), "sparsity.explicit");
  } else if (s.is_object() && s.contains("kron")) {
    const json& k = s.at("kron");
    if (!k.is_object() || !k.contains("S")) throw ParseError("sparsity.kron needs key 'S'");
    const BinaryMatrix small = binary_from_json(k.at("S"), "sparsity.kron.S");
    if (small.rows() != m || small.cols() != p) {
      throw DimensionMismatch("sparsity.kron.S must be " + std::to_string(m) + "x" + std::to_string(p));
    }
    const json T = k.value("T", json("causal"));
    if (T == "causal") {
      S = kron_causal(small, N);
    } else {
      const BinaryMatrix Tm = binary_from_json(T, "sparsity.kron.T");
      if (Tm.rows() != N || Tm.cols() != N) throw DimensionMismatch("sparsity.kron.T must be NxN");
      S = BinaryMatrix::Zero(static_cast<Eigen::Index>(m) * N, static_cast<Eigen::Index>(p) * N);
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          if (Tm(i, j)) S.block(i * m, j * p, m, p) = small;
        }
      }
    }
  } else {
    throw ParseError("'sparsity' must be a 0/1 matrix or an object with 'explicit' or 'kron'");
  }
  return sparsity_subspace(SparsityPattern::make(S, m, p, N));
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json matrix_to_json(const MatrixXd& X) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < X.cols(); ++c) row.push_back(X(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return MatrixXd::Constant(1, 1, j.get<double>());
  if (!is_matrix(j)) throw ParseError(what + ": expected a matrix (array of numeric rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd X(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ParseError(what + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) X(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return X;
}

Problem parse_problem(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("problem document must be a JSON object");
  SystemData raw;
  raw.horizon = positive_int(doc, "horizon");
  if (!doc.contains("dims") || !doc.at("dims").is_object()) throw ParseError("missing object 'dims'");
  raw.n = positive_int(doc.at("dims"), "n");
  raw.m = positive_int(doc.at("dims"), "m");
  raw.p = positive_int(doc.at("dims"), "p");
  const int N = raw.horizon;
  raw.A = sequence_from_json(doc, "A", N);
  raw.B = sequence_from_json(doc, "B", N);
  raw.C = sequence_from_json(doc, "C", N);
  raw.M = sequence_from_json(doc, "M", N + 1);
  raw.R = sequence_from_json(doc, "R", N);
  raw.SigmaW = sequence_from_json(doc, "SigmaW", N);
  raw.SigmaV = sequence_from_json(doc, "SigmaV", N);
  if (!doc.contains("Sigma0")) throw ParseError("missing key 'Sigma0'");
  raw.Sigma0 = matrix_from_json(doc.at("Sigma0"), "Sigma0");
  if (!doc.contains("mu0")) throw ParseError("missing key 'mu0'");
  const json& mu = doc.at("mu0");
  if (mu.is_number()) {
    raw.mu0 = VectorXd::Constant(1, mu.get<double>());
  } else if (is_numeric_row(mu)) {
    raw.mu0.resize(static_cast<Eigen::Index>(mu.size()));
    for (std::size_t i = 0; i < mu.size(); ++i) raw.mu0(static_cast<Eigen::Index>(i)) = mu[i].get<double>();
  } else {
    throw ParseError("mu0: expected a numeric vector");
  }

  Problem problem;
  problem.system = validate_system_data(std::move(raw));
  problem.compact = assemble_compact(problem.system);
  problem.subspace = subspace_from_json(doc, problem.system.m, problem.system.p, N);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ParseError("'seed' must be a non-negative integer");
    problem.seed = doc.at("seed").get<std::uint64_t>();
  }
  return problem;
}

Problem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

MatrixXd parse_controller(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("K")) throw ParseError("controller file needs key 'K'");
  return matrix_from_json(doc.at("K"), "K");
}

MatrixXd load_controller(const std::string& path) { return parse_controller(read_file(path)); }

json config_to_json(const OptimizerConfig& cfg) {
  return {{"c1", cfg.c1},
          {"c2", cfg.c2},
          {"stop_tol", cfg.stop_tol},
          {"max_iters", cfg.max_iters},
          {"max_bisect", cfg.max_bisect},
          {"init_range", cfg.init_range},
          {"seed", cfg.seed}};
}

json report_to_json(const SynthesisReport& report) {
  json j{{"K", matrix_to_json(report.K)},
         {"J", report.J},
         {"residual", report.residual},
         {"iterations", report.iterations},
         {"converged", report.converged},
         {"cost_trace", report.cost_trace},
         {"trace_stride", report.trace_stride},
         {"wall_time", report.wall_time},
         {"seed", report.seed}};
  if (report.certificate) j["certificate"] = to_string(*report.certificate);
  return j;
}

SynthesisReport report_from_json(const json& j) {
  try {
    SynthesisReport r;
    r.K = matrix_from_json(j.at("K"), "K");
    r.J = j.at("J").get<double>();
    r.residual = j.at("residual").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.cost_trace = j.at("cost_trace").get<std::vector<double>>();
    r.trace_stride = j.at("trace_stride").get<int>();
    r.wall_time = j.at("wall_time").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("certificate")) {
      r.certificate = certificate_from_string(j.at("certificate").get<std::string>());
      if (!r.certificate) throw ParseError("unknown certificate tag");
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

json us_certificate_to_json(const USCertificate& cert) {
  json j{{"verdict", to_string(cert.verdict)},
         {"test", cert.test},
         {"heuristic", cert.heuristic},
         {"samples", cert.samples},
         {"min_eigenvalue", cert.min_eigenvalue}};
  if (cert.witness) j["witness"] = std::vector<double>(cert.witness->data(), cert.witness->data() + cert.witness->size());
  return j;
}

}  // namespace dlqg
