#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dlqg/cli.hpp"
#include "dlqg/cost.hpp"
#include "dlqg/errors.hpp"
#include "dlqg/io.hpp"
#include "support.hpp"

namespace dlqg {
namespace {

namespace fs = std::filesystem;

const std::string kExample1 = std::string(DLQG_DATA_DIR) + "/example1.json";
const std::string kExample2 = std::string(DLQG_DATA_DIR) + "/example2.json";

struct CliRun {
  int code;
  json doc;
  std::string raw;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "dlqg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  CliRun r{code, json(), out.str()};
  if (!r.raw.empty()) r.doc = json::parse(r.raw, nullptr, false);
  return r;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("dlqg_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

const char* kScalarProblem = R"({
  "horizon": 2,
  "dims": {"n": 1, "m": 1, "p": 1},
  "A": [[[0.5]], [[1.5]]],
  "B": 1, "C": 2, "M": 1, "R": 0.5,
  "Sigma0": 1, "SigmaW": 1, "SigmaV": 1,
  "mu0": [1]
})";

TEST(Parse, TimeInvariantAndSequenceForms) {
  const Problem p = parse_problem(kScalarProblem);
  EXPECT_EQ(p.system.horizon, 2);
  ASSERT_EQ(p.system.A.size(), 2u);
  EXPECT_DOUBLE_EQ(p.system.A[1](0, 0), 1.5);
  EXPECT_EQ(p.system.M.size(), 3u);
  EXPECT_EQ(p.subspace.kind, SubspaceKind::Sparsity);
  EXPECT_EQ(p.subspace.dim(), 3);  // full causal pattern by default
  EXPECT_FALSE(p.seed.has_value());
}

TEST(Parse, ReferenceFilesMatchProgrammaticInstances) {
  const Problem p1 = load_problem(kExample1);
  EXPECT_EQ(p1.subspace.dim(), 30);
  EXPECT_EQ(p1.subspace.pattern->matrix(), testing::example1_pattern().matrix());
  const CompactSystem cs1 = assemble_compact(testing::example1_system());
  EXPECT_NEAR(p1.compact.open_loop_cost, cs1.open_loop_cost, 1e-12 * cs1.open_loop_cost);
  const Problem p2 = load_problem(kExample2);
  EXPECT_EQ(p2.subspace.kind, SubspaceKind::StaticDiag);
  EXPECT_NEAR(cost_k(p2.compact, MatrixXd::Zero(4, 4)), 166.0, 1e-10);
}

TEST(Parse, SparsityVariants) {
  json doc = json::parse(kScalarProblem);
  doc["sparsity"] = {{"kron", {{"T", "causal"}, {"S", {{1}}}}}};
  EXPECT_EQ(parse_problem(doc.dump()).subspace.dim(), 3);
  doc["sparsity"] = {{1, 0}, {0, 1}};
  EXPECT_EQ(parse_problem(doc.dump()).subspace.dim(), 2);
  // An explicit matrix wins over the Kronecker description.
  doc["sparsity"] = {{"explicit", {{1, 0}, {0, 0}}}, {"kron", {{"T", "causal"}, {"S", {{1}}}}}};
  EXPECT_EQ(parse_problem(doc.dump()).subspace.dim(), 1);
  doc["sparsity"] = {{0, 1}, {0, 0}};
  EXPECT_THROW(parse_problem(doc.dump()), NonCausalPattern);
  doc["sparsity"] = {{1, 0}, {1, 1}};
  doc["subspace"] = {{"static_diag", true}};
  EXPECT_THROW(parse_problem(doc.dump()), ParseError);
}

TEST(Parse, MalformedJsonReportsPosition) {
  try {
    parse_problem("{\n  \"horizon\": 2,\n  \"dims\": [1,\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_GE(e.column(), 1);
  }
}

TEST(Parse, MissingOrRaggedFields) {
  json doc = json::parse(kScalarProblem);
  doc.erase("R");
  EXPECT_THROW(parse_problem(doc.dump()), ParseError);
  doc = json::parse(kScalarProblem);
  doc["A"] = {{1, 2}, {3}};
  EXPECT_THROW(parse_problem(doc.dump()), Error);
  doc = json::parse(kScalarProblem);
  doc["A"] = {{{1}}, {{2}}, {{3}}};
  EXPECT_THROW(parse_problem(doc.dump()), DimensionMismatch);
}

TEST(Parse, ZeroInputWeightIsNotDefinite) {
  json doc = json::parse(kScalarProblem);
  doc["R"] = {{{0.0}}, {{1.0}}};
  try {
    parse_problem(doc.dump());
    FAIL() << "expected NotDefinite";
  } catch (const NotDefinite& e) {
    EXPECT_EQ(e.matrix(), "R");
    EXPECT_EQ(e.t(), 0);
  }
}

TEST(Report, JsonRoundTripIsExact) {
  SynthesisReport r;
  r.K = MatrixXd::Zero(2, 2);
  r.K(0, 0) = 0.1 + 0.2;
  r.K(1, 0) = -1.0 / 3.0;
  r.J = 796.56264781234567;
  r.residual = 4.9e-5;
  r.iterations = 12;
  r.converged = true;
  r.cost_trace = {1000.0 / 7.0, 796.56264781234567};
  r.certificate = Certificate::UsGlobal;
  r.seed = 42;
  const json j = json::parse(report_to_json(r).dump());
  const SynthesisReport back = report_from_json(j);
  EXPECT_EQ(back.K, r.K);
  EXPECT_EQ(back.J, r.J);
  EXPECT_EQ(back.cost_trace, r.cost_trace);
  EXPECT_EQ(back.certificate, r.certificate);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.iterations, r.iterations);
}

TEST(Cli, ValidateAndAnalyze) {
  CliRun v = run({"validate", kExample1});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_EQ(v.doc["subspace_dim"], 30);
  EXPECT_EQ(v.doc["manifest"]["command"], "validate");

  CliRun a = run({"analyze", kExample2, "--seed", "3"});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_FALSE(a.doc["qi_binary"].get<bool>());
  EXPECT_FALSE(a.doc["strong_qi_randomized"].get<bool>());
  EXPECT_TRUE(a.doc.contains("strong_qi_witness"));
  EXPECT_EQ(a.doc["us_certificate"], "US_BY_SAMPLED_CONVEXITY");
  EXPECT_EQ(a.doc["manifest"]["seed"], 3);

  CliRun b = run({"analyze", kExample1});
  ASSERT_EQ(b.code, kExitOk);
  EXPECT_TRUE(b.doc["qi_binary"].get<bool>());
  EXPECT_EQ(b.doc["us_certificate"], "US_BY_STRONG_QI");
}

TEST(Cli, SynthesizeAndSimulateRoundTrip) {
  TempDir dir;
  const std::string report = dir.file("k.json");
  CliRun s = run({"synthesize", kExample2, "--seed", "1", "--out", report});
  ASSERT_EQ(s.code, kExitOk) << s.raw;
  const json doc = json::parse(read_file(report));
  EXPECT_EQ(doc["certificate"], "US_GLOBAL");
  EXPECT_NEAR(doc["K"][0][0].get<double>(), 0.2752, 1e-3);
  EXPECT_NEAR(doc["K"][3][3].get<double>(), 1.1354, 1e-3);

  CliRun sim = run({"simulate", kExample2, report, "--samples", "20000", "--seed", "5"});
  ASSERT_EQ(sim.code, kExitOk) << sim.raw;
  EXPECT_LT(std::abs(sim.doc["z_score"].get<double>()), 5.0);
  EXPECT_NEAR(sim.doc["analytic_J"].get<double>(), doc["J"].get<double>(), 1e-9);
}

TEST(Cli, SynthesizeWithOracleOnQiInstance) {
  CliRun s = run({"synthesize", kExample1, "--oracle", "--starts", "2", "--jobs", "2"});
  ASSERT_EQ(s.code, kExitOk) << s.raw;
  EXPECT_EQ(s.doc["certificate"], "QI_GLOBAL");
  EXPECT_LT(s.doc["oracle"]["gap"].get<double>(), 1e-3);
  EXPECT_TRUE(s.doc["oracle"]["qi"].get<bool>());
  EXPECT_EQ(s.doc["starts"].size(), 2u);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run({"synthesize", kExample1, "--max-iters", "1"}).code, kExitNotConverged);
  EXPECT_EQ(run({"validate", dir.file("missing.json")}).code, kExitInput);
  EXPECT_EQ(run({"validate", dir.write("bad.json", "{ \"horizon\": ")}).code, kExitInput);
  json doc = json::parse(kScalarProblem);
  doc["R"] = 0;
  CliRun r = run({"validate", dir.write("r0.json", doc.dump())});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_EQ(r.doc["error"]["kind"], "NotPD");
  EXPECT_EQ(r.doc["error"]["matrix"], "R");
  EXPECT_EQ(run({"simulate", kExample2, dir.write("k.json", R"({"K": [[0,0,1,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]})"), "--samples", "10"}).code,
            kExitInput);
  EXPECT_EQ(run({"simulate", kExample2, dir.write("k0.json", R"({"K": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]})"), "--samples", "0"}).code,
            kExitInput);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(run({}).code, kExitInput);
}

TEST(Cli, SimulateWithFewSamples) {
  TempDir dir;
  const std::string k = dir.write("k.json", R"({"K": [[0.5,0,0,0],[0,0.5,0,0],[0,0,0.5,0],[0,0,0,0.5]]})");
  CliRun sim = run({"simulate", kExample2, k, "--samples", "50", "--seed", "2"});
  EXPECT_EQ(sim.code, kExitOk);
  EXPECT_TRUE(sim.doc.contains("z_score"));
}

}  // namespace
}  // namespace dlqg
