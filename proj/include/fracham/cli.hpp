#pragma once

#include "fracham/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fracham {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitValidation = 3,
  kExitConvergence = 4,
};

/// Environment variable that overrides run.output_dir (a --output-dir flag
/// still takes precedence).
inline constexpr const char* kOutputDirEnv = "FRACHAM_OUTPUT_DIR";

struct CommandConfig {
  std::string subcommand;  // validate | operators | solve | bvp | sweep
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;  // section.key=value
};

/// One row of the grid-refinement study of the left GL derivative of t^2 on
/// [0, 1]; the error is the max relative error over nodes in [0.1, 0.9].
struct OperatorStudyRow {
  std::size_t n_intervals = 0;
  double h = 0.0;
  double max_rel_error = 0.0;
  double ratio = 0.0;  // error at the previous size / error here; 0 for the first row
};

std::vector<OperatorStudyRow> operator_convergence_study(double alpha, const std::vector<std::size_t>& sizes);

/// Stiffness energy against the squared Fourier seminorm for a Gaussian bump.
struct SpectralComparison {
  double alpha = 0.0;
  double stiffness = 0.0;
  double fourier = 0.0;
  double rel_diff = 0.0;
};

SpectralComparison stiffness_vs_fourier(double alpha);

/// Largest |<D_L u, v>_h - <u, D_R v>_h| / (||u|| ||v||) over random
/// compactly supported pairs.
double adjointness_defect(double alpha, std::size_t pairs, std::uint64_t seed);

/// Executes one subcommand, writing artifacts under the output directory and
/// a human-readable summary to `out`. On failure writes error.json and
/// returns the matching ExitCode.
int run(const CommandConfig& command, std::ostream& out, std::ostream& err);

} // namespace fracham
