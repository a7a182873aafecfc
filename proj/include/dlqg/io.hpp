#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "dlqg/model.hpp"
#include "dlqg/optimize.hpp"
#include "dlqg/subspace.hpp"

namespace dlqg {

using nlohmann::json;

// A validated problem: plant, compact form and controller subspace.
struct Problem {
  SystemData system;
  CompactSystem compact;
  SubspaceSpec subspace;
  std::optional<std::uint64_t> seed;  // file-level seed
};

// Parses and validates a problem document. Matrices are row-major nested
// arrays; a single matrix stands for the whole time-invariant sequence.
// Throws ParseError, DimensionMismatch, NotDefinite, NonCausalPattern.
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

// {"K": [[...]]}. Throws ParseError.
MatrixXd parse_controller(const std::string& text);
MatrixXd load_controller(const std::string& path);

std::string read_file(const std::string& path);

json matrix_to_json(const MatrixXd& X);
// Throws ParseError.
MatrixXd matrix_from_json(const json& j, const std::string& what);

json config_to_json(const OptimizerConfig& cfg);
json report_to_json(const SynthesisReport& report);
// Throws ParseError.
SynthesisReport report_from_json(const json& j);

json us_certificate_to_json(const USCertificate& cert);

}  // namespace dlqg
