#pragma once

#include "gpf/constructions.hpp"
#include "gpf/frame_spec.hpp"
#include "gpf/generate.hpp"

#include <optional>
#include <string>

namespace gpf {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitBesselOnly = 2,
  kExitNotFrame = 3,
  kExitInapplicable = 4,
  kExitVerificationFailed = 5,
};

struct CommonOptions {
  std::uint64_t seed = 0;
  int restarts = 20;
  /// Relative gap under which A and B count as equal (tight).
  double tol = 1e-6;
  bool p2_exact = true;
  /// Adds wall-clock timings to the report. Off by default so reports are
  /// byte-identical across runs.
  bool timing = false;

  EstimatorOptions estimator() const;
  ClassifyTolerances tolerances() const;
};

struct CommandResult {
  /// Structured report (empty for `gen`, whose output is a frame file).
  Json report = Json::object();
  int exit_code = kExitOk;
  /// Human-readable lines for stderr.
  std::string summary;
  /// Exact text for stdout.
  std::string output;
};

struct PerturbArgs {
  std::string lambda_file;
  std::string gamma_file;
  bool radius_mode = false;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu = 0.0;
};

enum class CombineMode { DirectSum, Tensor };

struct CombineArgs {
  std::string x_file;
  std::string y_file;
  CombineMode mode = CombineMode::DirectSum;
  /// Also write the combined frame file here.
  std::optional<std::string> out_file;
};

CommandResult run_check(const std::string& file, const CommonOptions& opts, std::size_t duality_samples = 100);
CommandResult run_perturb(const PerturbArgs& args, const CommonOptions& opts);
CommandResult run_combine(const CombineArgs& args, const CommonOptions& opts);
CommandResult run_riesz(const std::string& file, const CommonOptions& opts);
CommandResult run_gen(const GenRequest& request);

/// JSON view of an estimate, witness included.
Json estimate_to_json(const BoundEstimate& e);

std::string read_text_file(const std::string& path);

}  // namespace gpf
