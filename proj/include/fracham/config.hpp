#pragma once

#include "fracham/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fracham {

/// Every tunable of a run, keyed in the INI file as section.key.
struct RunConfig {
  // [problem]
  double alpha = 0.75;
  std::size_t n_components = 1;
  double lambda = 100.0;
  double truncation_R = 8.0;
  std::size_t n_nodes = 2049;
  double T_end = 1.0;
  std::string bvp_derivative_extent = "line";
  // [potential]
  std::string potential = "builtin";  // builtin | power
  double theta = 3.0;
  double epsilon = 1.0;
  double a0 = 1.0;
  double a_amplitude = 0.0;
  double a_period = 1.0;
  // [weight]
  std::string weight = "builtin";
  double c = 1.0;
  double l_max = 100.0;
  double J_lo = 0.0;
  double J_hi = 1.0;
  double ramp = 0.1;
  // [solver]
  double gradient_tol = 1e-7;
  std::size_t max_iterations = 10000;
  double fibering_tol = 1e-10;
  std::size_t multistart = 20;
  std::size_t threads = 1;
  double boundary_tol = 1e-3;
  double boundary_layer = 1.0;
  // [embedding]
  std::optional<double> c_inf;  // "auto" when unset
  std::size_t c_inf_samples = 200;
  // [sweep]
  std::vector<double> lambda_list{10.0, 100.0, 1000.0, 10000.0};
  bool warm_start = true;
  // [operators]
  double operator_alpha = 0.7;
  std::vector<std::size_t> operator_sizes{128, 256, 512, 1024, 2048};
  // [run]
  std::uint64_t seed = 20240601;
  std::string output_dir = "out";
};

/// Reads an INI file (empty path: defaults only), then applies overrides of
/// the form "section.key=value". Unknown sections or keys, malformed values
/// and parse errors raise ConfigError naming the line or field.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::string>& overrides = {});

/// Parses INI text (used by load_run_config and tests).
RunConfig parse_run_config(const std::string& ini_text, const std::vector<std::string>& overrides = {});

/// Canonical INI rendering of the resolved configuration.
std::string to_ini(const RunConfig& rc);

/// Canonical JSON rendering of the resolved configuration.
std::string to_json_text(const RunConfig& rc, int indent = 2);

/// Builds potential, weight and problem from the run configuration. With
/// enforce_embedding the weight is rejected when meas{l<c} >= 1/C_inf^2.
ProblemConfig build_problem(const RunConfig& rc, bool enforce_embedding = true);

} // namespace fracham
