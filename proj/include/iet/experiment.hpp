#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "iet/ratner.hpp"
#include "iet/regularity.hpp"

namespace iet {

inline constexpr const char* kVersion = "0.1.0";

/// Named instances: golden, sqrt2, genus2-loop, unbounded-quotients, euclid.
std::vector<std::string> builtin_names();
Iet builtin_instance(const std::string& name);

nlohmann::json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const nlohmann::json& j);
nlohmann::json iet_to_json(const Iet& t);
Iet iet_from_json(const nlohmann::json& j);
/// Builtin name, inline JSON (starting with '{') or a path to a JSON file.
nlohmann::json resolve_instance(const std::string& source);

nlohmann::json roof_to_json(const Iet& t, const RoofSpec& spec);
RoofSpec roof_from_json(const Iet& t, const nlohmann::json& j);
/// "symmetric" (the single symmetric pair at 0), inline JSON or a file.
nlohmann::json resolve_roof(const Iet& t, const std::string& source);

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct ExperimentConfig {
  std::string instance = "golden";
  std::string roof = "symmetric";
  std::string schedule = "mmy";
  long depth = 50;
  int K = 50;
  std::vector<std::string> scales = {"1e-3", "1e-4", "1e-5"};
  long pairs = 100;
  std::string mode = "adaptive";
  std::uint64_t seed = 42;
  long precision_bits = kDefaultPrecisionBits;
  std::string out = ".";
  int jobs = 1;
  /// Constant inputs as JSON, or "measure".
  std::string constants = "measure";
  std::string eps = "1/10";
  long N = 1;
  long n_max = 2000;
  long samples = 1000;
};

/// Config as resolved JSON (instance and roof inlined) for hashing and
/// embedding in outputs. The output directory and job count are excluded.
nlohmann::json config_json(const ExperimentConfig& cfg, const std::string& command);

enum ExitCode : int {
  kExitOk = 0,
  kExitInduction = 2,
  kExitCertification = 3,
  kExitSweep = 4,
  kExitUsage = 64,
};

/// Constants for a sweep measured on the instance: c = 1.1 c*, C = the
/// balance-matrix constant, M' from the cancellation audit (doubled in
/// strict mode) and D from the derivative estimate.
ConstantInputs measure_constants(const Roof& roof, const ExperimentConfig& cfg);
ConstantInputs constants_from_json(const nlohmann::json& j);
nlohmann::json constants_to_json(const RatnerConstants& k);

/// Each command writes its artifacts under cfg.out and returns an exit code;
/// diagnostics go to `err`.
int cmd_induct(const ExperimentConfig& cfg, std::ostream& err);
int cmd_certify(const ExperimentConfig& cfg, std::ostream& err);
int cmd_gaps(const ExperimentConfig& cfg, std::ostream& err);
int cmd_audit(const ExperimentConfig& cfg, std::ostream& err);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& err);

}  // namespace iet
