#pragma once

#include "fracham/solver.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace fracham {

/// Smooth bump sin^2(pi (t - T.lo) / |T|) on T, zero elsewhere, in every
/// component.
GridFunction bump_in(const Grid1D& grid, const Interval& T, std::size_t n_components);

/// max over sigma >= 0 of I(sigma phi0). Because L vanishes on T the value
/// does not depend on lambda. Throws std::invalid_argument if phi0 is nonzero
/// at a node outside T.
double bump_energy_bound(const DiscreteProblem& problem, const GridFunction& phi0, const Interval& T);

/// Fraction of the squared L2 mass outside T.
double tail_mass_fraction(const GridFunction& u, const Interval& T);

/// u on a grid of equal spacing containing u's grid, zero outside.
GridFunction zero_extend(const GridFunction& u, const Grid1D& target);

struct SweepRecord {
  double lambda = 0.0;
  double c_lambda = 0.0;
  double x_norm_sq = 0.0;
  double tail_mass_fraction = 0.0;
  double h_alpha_distance = 0.0;
  double bound_ratio = 0.0;
  // diagnostics beyond the table
  double weighted_mass = 0.0;        // trapz l |u|^2
  double weighted_mass_bound = 0.0;  // x_norm_sq / lambda
  double gradient_norm = 0.0;
  double strong_residual = 0.0;
  double rho_observed = 0.0;
  double multistart_spread = 0.0;
  double boundary_magnitude = 0.0;
  std::size_t starts = 0;
};

struct SweepFlags {
  bool c_lambda_nondecreasing = false;
  bool c_lambda_below_c_tilde = false;
  bool c_lambda_below_bump_bound = false;
  bool energy_above_rho = false;
  bool bound_ratio_ok = false;
  bool weighted_mass_ok = false;
  bool tail_mass_decreasing = false;
  bool h_alpha_nonincreasing = false;  // soft
};

struct SweepOptions {
  bool warm_start = true;
  double energy_tol = 1e-8;  // slack in c_lambda <= c_tilde and monotonicity
  double bound_tol = 1e-6;   // slack in bound_ratio <= 1
};

struct SweepReport {
  std::vector<SweepRecord> records;  // ascending lambda
  double c_tilde = 0.0;
  double bump_bound = 0.0;
  double u_tilde_h_alpha = 0.0;
  SweepFlags flags;
  bool complete = false;
  std::string error;
  std::vector<std::string> violations;
  std::optional<GroundState> bvp;
  std::vector<GroundState> states;  // one per record
};

/// Solves the BVP once, then the line problem for each lambda, and assembles
/// the records. With warm starts the sweep is sequential: the first lambda
/// gets a full multistart, later ones start from the previous minimiser and
/// the last is re-certified by a fresh multistart. Without warm starts every
/// lambda gets a full multistart and lambdas run on config.threads workers.
/// A failing solve stops the sweep and leaves complete = false.
SweepReport run_sweep(const std::vector<double>& lambdas, const ProblemConfig& config,
                      const SweepOptions& opts = {});

inline constexpr const char* kSweepCsvHeader =
    "lambda,c_lambda,x_norm_sq,tail_mass_fraction,h_alpha_distance,bound_ratio";

/// Table with one row per record. Every line of `preamble` is written first
/// as a '#' comment.
void write_sweep_csv(std::ostream& os, const SweepReport& report, const std::string& preamble = {});

/// Plain-text summary of the sweep, its flags and violations.
std::string sweep_summary(const SweepReport& report);

/// Two-column (t, u) text; one column per component after t.
void write_profile(std::ostream& os, const GridFunction& u, const std::string& preamble = {});

/// Writes `text` with every line prefixed by "# ".
void write_comment_block(std::ostream& os, const std::string& text);

} // namespace fracham
