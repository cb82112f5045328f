#pragma once

#include "fracham/discrete_problem.hpp"
#include "fracham/nehari.hpp"
#include "fracham/potentials.hpp"
#include "fracham/spaces.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracham {

/// Which part of the line the BVP's fractional energy is integrated over.
/// `line` integrates the left derivative of the zero-extended function up to
/// the truncation radius, which is the energy it has as a member of the line
/// problem. `interval` integrates over [0, t_end] only.
enum class DerivativeExtent { line, interval };

std::string to_string(DerivativeExtent e);
DerivativeExtent derivative_extent_from_string(const std::string& s);

/// Full description of one line problem and its companion BVP.
struct ProblemConfig {
  FracOrder order{0.75};
  double lambda = 100.0;
  double truncation_R = 8.0;
  Grid1D grid{-8.0, 8.0, 2049};   // line grid on [-R, R]
  double t_end = 1.0;             // BVP interval [0, t_end]
  std::size_t n_components = 1;
  PotentialSpec potential;
  WeightSpec weight;
  OptimizerOptions optimizer;
  std::size_t multistart = 20;
  std::uint64_t seed = 20240601;
  std::size_t threads = 1;
  /// Accepted ratio max|u| on the outer boundary layer / max|u|.
  double boundary_tol = 1e-3;
  double boundary_layer = 1.0;
  DerivativeExtent bvp_extent = DerivativeExtent::line;
  /// Embedding constant used for validation; NaN selects max(sampled, sharp).
  std::optional<double> c_inf_override;
  std::size_t c_inf_samples = 200;
  bool validate = true;
};

/// alpha = 0.75, n = 1, theta = 3, eps = 1, a = 1, T = J = [0, 1], ramp 0.1,
/// l_max = 100, c = 1, R = 8 and h = 1/128.
ProblemConfig reference_config();

/// Checks the structural invariants: alpha range, T inside (-R, R), T and
/// [0, t_end] aligned with grid nodes, at least 64 nodes across T.
/// Throws ConfigError.
void check_config(const ProblemConfig& config);

/// Grid on [0, t_end] with the line grid's spacing.
Grid1D bvp_grid(const ProblemConfig& config);

DiscreteProblem line_problem(const ProblemConfig& config, double lambda);
DiscreteProblem bvp_problem(const ProblemConfig& config);

/// Smooth random start on the problem's grid: a positive sum of three
/// Gaussians placed around T, times a sine window vanishing at the ends.
Eigen::VectorXd random_start(const DiscreteProblem& problem, const Interval& support, std::uint64_t seed,
                             std::size_t index);

struct StartRecord {
  std::size_t index = 0;
  double energy = 0.0;
  double gradient_norm = 0.0;
  double x_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string diagnosis;
};

struct MultistartResult {
  std::vector<StartRecord> starts;  // sorted by (energy, index)
  std::vector<ReducedResult> results; // same order as starts
  double spread = 0.0;              // over converged starts
  std::size_t converged = 0;
  double nu_observed = 0.0;         // min Nehari norm over all projected points seen
};

/// Independent minimisations from the given starts, run on up to `threads`
/// workers and merged deterministically.
MultistartResult multistart(const DiscreteProblem& problem, const std::vector<Eigen::VectorXd>& starts,
                            const OptimizerOptions& opts, std::size_t threads);

struct GroundState {
  GridFunction u{Grid1D(0.0, 1.0, 3), 1};
  double energy = 0.0;
  double gradient_norm = 0.0;
  double full_gradient_norm = 0.0;
  double nehari_residual = 0.0;
  double strong_residual = 0.0;
  double x_norm = 0.0;
  double boundary_magnitude = 0.0;
  double multistart_spread = 0.0;
  double nu_observed = 0.0;
  double rho_observed = 0.0;    // (1/2 - 1/theta) nu_observed^2
  double lambda = 0.0;          // 0 for the BVP
  std::vector<StartRecord> starts;
  std::vector<IterationRecord> log; // iteration log of the best start
  std::optional<IntervalBounds> interval_bounds;
  std::optional<ValidationReport> validation;
  std::optional<EmbeddingEstimate> embedding;
  std::vector<std::string> warnings;

  std::size_t converged_count() const;
};

/// Dual norm of the discrete Euler-Lagrange residual, assembled matrix-free
/// from the left and right operators.
double strong_residual(const DiscreteProblem& problem, const Eigen::VectorXd& x);
double strong_residual(const DiscreteProblem& problem, const GridFunction& u);

/// max |u| over nodes within `layer` of either end, divided by max |u|.
double boundary_magnitude(const GridFunction& u, double layer);

/// Sampled C_inf estimate completed with the weight's sublevel measure.
EmbeddingEstimate embedding_for(const ProblemConfig& config);

/// Runs the hypothesis checks; throws ValidationError on any failure.
ValidationReport validate_config(const ProblemConfig& config, const EmbeddingEstimate& est);

struct SolveOptions {
  std::optional<double> lambda;                  // overrides config.lambda
  std::vector<Eigen::VectorXd> warm_starts;      // used in place of random starts
  std::optional<std::size_t> multistart;         // overrides config.multistart
  const DiscreteProblem* problem = nullptr;      // prebuilt problem to reuse
  bool skip_validation = false;
};

/// Ground state of the truncated line problem. Throws ValidationError,
/// ConvergenceError (no start converged, or the solution reaches the
/// truncation boundary).
GroundState solve_line(const ProblemConfig& config, const SolveOptions& opts = {});

/// Ground state of the Dirichlet problem on [0, t_end].
GroundState solve_bvp(const ProblemConfig& config, const SolveOptions& opts = {});

/// Largest delta with W(t, u) <= eps |u|^2 for |u| <= delta at the sampled
/// times, found by bisection in log scale along the first coordinate axis.
double small_amplitude_radius(const PotentialSpec& pot, double eps, const std::vector<double>& t_samples,
                              std::size_t n_components);

/// Mountain-pass geometry near the origin: with eps = Theta/4, delta from
/// small_amplitude_radius, rho = delta / (C_inf (1 + 1/Theta)^{1/2}) and
/// beta = (1/2 - eps/Theta) rho^2, every sampled u with ||u|| = rho must have
/// I(u) >= beta.
struct MountainPassCheck {
  double theta_const = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  double min_energy = 0.0;
  bool holds = false;
};

MountainPassCheck check_mountain_pass(const DiscreteProblem& problem, const EmbeddingEstimate& est,
                                      const std::vector<Eigen::VectorXd>& directions);

} // namespace fracham
