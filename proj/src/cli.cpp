#include "dlqg/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "dlqg/cost.hpp"
#include "dlqg/errors.hpp"
#include "dlqg/io.hpp"
#include "dlqg/optimize.hpp"
#include "dlqg/qp.hpp"
#include "dlqg/subspace.hpp"
#include "dlqg/ustest.hpp"

namespace dlqg {

namespace {

constexpr int kDefinitionTrials = 100;
constexpr int kConvexitySamples = 200;
constexpr double kMaxAbsZ = 5.0;
constexpr long kDefaultSamples = 100000;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
  auto logger = std::make_shared<spdlog::logger>("dlqg", sink);
  logger->set_pattern("[dlqg] [%l] %v");
  const char* env = std::getenv("DLQG_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else if (level == "info") {
    logger->set_level(spdlog::level::info);
  } else {
    logger->set_level(spdlog::level::err);
  }
  return logger;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json error_json(const std::exception& e) {
  json j{{"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["kind"] = err->kind();
    if (const auto* nd = dynamic_cast<const NotDefinite*>(err)) {
      j["matrix"] = nd->matrix();
      if (nd->t() >= 0) j["t"] = nd->t();
      j["eigenvalue"] = nd->eigenvalue();
    } else if (const auto* pe = dynamic_cast<const ParseError*>(err)) {
      if (pe->line() > 0) {
        j["line"] = pe->line();
        j["column"] = pe->column();
      }
    } else if (const auto* oe = dynamic_cast<const OptimizationError*>(err)) {
      j["cause"] = oe->cause_kind();
      j["iteration"] = oe->iteration();
      j["iterate"] = matrix_to_json(oe->iterate());
    }
  } else {
    j["kind"] = "InvalidArgument";
  }
  return j;
}

struct Options {
  std::string problem_path;
  std::string controller_path;
  std::string out_path;
  int starts = 1;
  bool oracle = false;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<int> max_iters;
  std::optional<double> stop_tol;
  long samples = kDefaultSamples;
};

json manifest(const std::string& command, const Options& opt, const json& config,
              std::uint64_t seed, const std::string& started) {
  json m{{"command", command},
         {"problem", opt.problem_path},
         {"config", config},
         {"seed", seed},
         {"version", DLQG_VERSION},
         {"started_at", started},
         {"finished_at", timestamp()}};
  if (!opt.controller_path.empty()) m["controller"] = opt.controller_path;
  return m;
}

std::uint64_t resolve_seed(const Options& opt, const Problem& problem) {
  if (opt.seed) return *opt.seed;
  return problem.seed.value_or(0);
}

void emit(const json& doc, const Options& opt, std::ostream& out) {
  const std::string text = doc.dump(2);
  if (opt.out_path.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream f(opt.out_path);
  if (!f) throw ParseError("cannot write '" + opt.out_path + "'");
  f << text << '\n';
}

// The strong-QI shortcut when it applies, otherwise sampled convexity of the
// restricted controller-domain cost.
USCertificate us_certificate(const Problem& problem, std::uint64_t seed, double radius) {
  const BinaryMatrix delta = binary_delta(problem.compact.G);
  if (problem.subspace.kind == SubspaceKind::Sparsity) {
    USCertificate cert = us_via_strong_qi(problem.subspace, delta);
    if (cert.certifies_us()) return cert;
  }
  return sampled_convexity_test(restricted_k_cost(problem.compact, problem.subspace),
                                kConvexitySamples, radius, seed);
}

int cmd_validate(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const std::string started = timestamp();
  const Problem problem = load_problem(opt.problem_path);
  log.info("validated {}: N={} n={} m={} p={}", opt.problem_path, problem.system.horizon,
           problem.system.n, problem.system.m, problem.system.p);
  json doc{{"ok", true},
           {"horizon", problem.system.horizon},
           {"dims", {{"n", problem.system.n}, {"m", problem.system.m}, {"p", problem.system.p}}},
           {"subspace_kind", to_string(problem.subspace.kind)},
           {"subspace_dim", problem.subspace.dim()}};
  doc["manifest"] = manifest("validate", opt, json::object(), resolve_seed(opt, problem), started);
  emit(doc, opt, out);
  return kExitOk;
}

int cmd_analyze(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const std::string started = timestamp();
  const Problem problem = load_problem(opt.problem_path);
  const std::uint64_t seed = resolve_seed(opt, problem);
  const OptimizerConfig cfg;
  const CompactSystem& cs = problem.compact;
  const SubspaceSpec& spec = problem.subspace;
  const BinaryMatrix delta = binary_delta(cs.G);

  json doc;
  doc["subspace_kind"] = to_string(spec.kind);
  doc["subspace_dim"] = spec.dim();
  doc["qi_binary"] = qi_test_binary(spec.envelope(), delta);
  doc["qi_binary_on"] = spec.kind == SubspaceKind::Sparsity ? "pattern" : "envelope";

  const QiDefinitionResult def = qi_test_definition(spec, cs.G, kDefinitionTrials, seed);
  doc["strong_qi_randomized"] = def.strong_qi;
  doc["qi_randomized"] = def.qi;
  doc["randomized_trials"] = def.trials;
  if (def.strong_witness) {
    doc["strong_qi_witness"] = {{"row", def.strong_witness->row},
                                {"col", def.strong_witness->col},
                                {"residual", def.strong_witness->residual},
                                {"product", matrix_to_json(def.strong_witness->product)}};
  }
  log.info("qi_binary={} strong_qi_randomized={}", doc["qi_binary"].get<bool>(), def.strong_qi);

  const double radius = 2.0 * cfg.init_range;
  const USCertificate cert = us_certificate(problem, seed, radius);
  doc["us_certificate"] = to_string(cert.verdict);
  doc["us_evidence"] = us_certificate_to_json(cert);
  json config{{"definition_trials", kDefinitionTrials},
              {"convexity_samples", kConvexitySamples},
              {"convexity_radius", radius},
              {"eig_tol", kEigTol}};
  doc["manifest"] = manifest("analyze", opt, config, seed, started);
  emit(doc, opt, out);
  return kExitOk;
}

int cmd_synthesize(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const std::string started = timestamp();
  const Problem problem = load_problem(opt.problem_path);
  OptimizerConfig cfg;
  cfg.seed = resolve_seed(opt, problem);
  if (opt.max_iters) cfg.max_iters = *opt.max_iters;
  if (opt.stop_tol) cfg.stop_tol = *opt.stop_tol;
  cfg.validate();

  const CompactSystem& cs = problem.compact;
  const SubspaceSpec& spec = problem.subspace;
  const bool qi = spec.kind == SubspaceKind::Sparsity &&
                  qi_test_binary(*spec.pattern, binary_delta(cs.G));
  std::optional<USCertificate> us;
  if (!qi) {
    us = us_certificate(problem, cfg.seed, 2.0 * cfg.init_range);
    log.info("subspace is not QI; US test verdict {}", to_string(us->verdict));
  }

  const MultiStartResult ms = multi_start(cs, spec, cfg, opt.starts, opt.jobs, us);
  const SynthesisReport& best = ms.runs[ms.best];
  for (const auto& run : ms.runs) {
    log.debug("seed {}: J={} iterations={} converged={}", run.seed, run.J, run.iterations,
              run.converged);
  }

  json doc = report_to_json(best);
  json starts = json::array();
  for (const auto& run : ms.runs) {
    starts.push_back({{"seed", run.seed},
                      {"J", run.J},
                      {"iterations", run.iterations},
                      {"converged", run.converged},
                      {"residual", run.residual}});
  }
  doc["starts"] = starts;
  if (us) doc["us_evidence"] = us_certificate_to_json(*us);
  if (opt.oracle) {
    const QDomainSolution sol = solve_q_domain(cs, spec);
    doc["oracle"] = {{"J_qp", sol.J},
                     {"gap", std::abs(best.J - sol.J)},
                     {"qi", qi},
                     {"label", qi ? "Q-domain optimum (controller-feasible under QI)"
                                  : "Q-domain optimum (not controller-feasible unless QI)"}};
  }
  json config = config_to_json(cfg);
  config["starts"] = opt.starts;
  config["jobs"] = opt.jobs;
  config["oracle"] = opt.oracle;
  doc["manifest"] = manifest("synthesize", opt, config, cfg.seed, started);
  emit(doc, opt, out);
  if (!best.converged) {
    log.error("best start did not converge: residual {} >= stop_tol {}", best.residual, cfg.stop_tol);
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_simulate(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const std::string started = timestamp();
  if (opt.samples < 1) throw std::invalid_argument("--samples must be >= 1");
  const Problem problem = load_problem(opt.problem_path);
  const std::uint64_t seed = resolve_seed(opt, problem);
  const MatrixXd K = load_controller(opt.controller_path);
  const double analytic = cost_k(problem.compact, K);
  const MonteCarloEstimate mc = monte_carlo_cost(problem.compact, K, opt.samples, seed, opt.jobs);
  const double diff = mc.mean - analytic;
  double z = 0.0;
  if (mc.std_error > 0.0) {
    z = diff / mc.std_error;
  } else if (std::abs(diff) > 1e-9 * (1.0 + std::abs(analytic))) {
    z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  log.info("analytic J={} mc mean={} stderr={} z={}", analytic, mc.mean, mc.std_error, z);
  json doc{{"analytic_J", analytic},
           {"mc_mean", mc.mean},
           {"mc_stderr", mc.std_error},
           {"samples", mc.samples}};
  doc["z_score"] = std::isfinite(z) ? json(z) : json(z > 0 ? "inf" : "-inf");
  json config{{"samples", opt.samples}, {"jobs", opt.jobs}};
  doc["manifest"] = manifest("simulate", opt, config, seed, started);
  emit(doc, opt, out);
  return std::abs(z) > kMaxAbsZ ? kExitSimulationMismatch : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  Options opt;
  CLI::App app{"Distributed finite-horizon LQG controller synthesis"};
  app.require_subcommand(1);
  app.footer(
      "Seed precedence: --seed, then the problem file's \"seed\", then 0.\n"
      "Exit codes: 0 ok, 1 numerical failure, 2 input/usage error, 3 not converged, "
      "4 simulation mismatch. DLQG_LOG=error|info|debug sets stderr logging.");

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { opt.seed = s; },
        "Random seed (overrides the problem file's seed)");
    sub->add_option("--out", opt.out_path, "Write the JSON report to PATH instead of stdout");
  };

  auto* validate = app.add_subcommand("validate", "Check a problem file");
  validate->add_option("problem", opt.problem_path, "Problem JSON file")->required();
  add_seed(validate);

  auto* analyze = app.add_subcommand("analyze", "QI and unique-stationarity tests");
  analyze->add_option("problem", opt.problem_path, "Problem JSON file")->required();
  add_seed(analyze);

  auto* synthesize = app.add_subcommand("synthesize", "Projected gradient descent synthesis");
  synthesize->add_option("problem", opt.problem_path, "Problem JSON file")->required();
  add_seed(synthesize);
  synthesize->add_option("--starts", opt.starts, "Number of random starts")
      ->check(CLI::PositiveNumber);
  synthesize->add_flag("--oracle", opt.oracle, "Also solve the Youla-domain problem and report the gap");
  synthesize->add_option("--jobs", opt.jobs, "Parallel workers")->check(CLI::PositiveNumber);
  synthesize->add_option_function<int>(
      "--max-iters", [&](const int& v) { opt.max_iters = v; }, "Iteration cap per start");
  synthesize->add_option_function<double>(
      "--stop-tol", [&](const double& v) { opt.stop_tol = v; },
      "Stop when max |projected gradient| < X");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of the analytic cost");
  simulate->add_option("problem", opt.problem_path, "Problem JSON file")->required();
  simulate->add_option("controller", opt.controller_path, "Controller JSON file ({\"K\": ...})")
      ->required();
  add_seed(simulate);
  simulate->add_option("--samples", opt.samples, "Number of samples");
  simulate->add_option("--jobs", opt.jobs, "Parallel workers")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "validate") return cmd_validate(opt, out, *log);
    if (command == "analyze") return cmd_analyze(opt, out, *log);
    if (command == "synthesize") return cmd_synthesize(opt, out, *log);
    return cmd_simulate(opt, out, *log);
  } catch (const OptimizationError& e) {
    log->error("{}", e.what());
    out << json{{"ok", false}, {"error", error_json(e)}}.dump(2) << '\n';
    return kExitFailure;
  } catch (const NumericallyIndefinite& e) {
    log->error("{}", e.what());
    out << json{{"ok", false}, {"error", error_json(e)}}.dump(2) << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    out << json{{"ok", false}, {"error", error_json(e)}}.dump(2) << '\n';
    return kExitInput;
  }
}

}  // namespace dlqg
