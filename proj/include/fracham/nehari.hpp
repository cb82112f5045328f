#pragma once

#include "fracham/discrete_problem.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fracham {

/// I(x) = 1/2 ||x||^2 - trapz W(t, x).
double energy(const DiscreteProblem& problem, const Eigen::VectorXd& x);
double energy(const DiscreteProblem& problem, const GridFunction& u);

/// Derivative of I at x: `dual` satisfies dual . v = I'(x) v for every dof
/// vector v, and `riesz` is its representative in the problem's inner product.
struct EnergyGradient {
  Eigen::VectorXd dual;
  Eigen::VectorXd riesz;
  double norm() const { return std::sqrt(std::max(0.0, dual.dot(riesz))); }
};

EnergyGradient energy_gradient(const DiscreteProblem& problem, const Eigen::VectorXd& x);
GridFunction energy_gradient(const DiscreteProblem& problem, const GridFunction& u);

/// Maximiser of the ray map sigma -> I(sigma x).
struct FiberingResult {
  double sigma = 0.0;
  double value = 0.0;
  double derivative_residual = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  std::size_t iterations = 0;
};

/// d/dsigma I(sigma x) = sigma ||x||^2 - trapz (grad W(sigma x), x).
double fibering_derivative(const DiscreteProblem& problem, const Eigen::VectorXd& x, double sigma,
                           double norm_sq);

/// Positive root of the ray derivative by geometric bracketing followed by
/// TOMS 748 refinement. The root is accepted once |h'| <= tol * ||x||^2.
/// Throws std::invalid_argument for x = 0 and ConvergenceError if no bracket
/// is found within max_expansions doublings.
FiberingResult fibering_sigma(const DiscreteProblem& problem, const Eigen::VectorXd& x,
                              double tol = 1e-10, std::size_t max_expansions = 200);
FiberingResult fibering_sigma(const DiscreteProblem& problem, const GridFunction& u,
                              double tol = 1e-10, std::size_t max_expansions = 200);

/// Number of sign changes of the ray derivative on a geometric grid of
/// `samples` points spanning [lo, hi].
std::size_t fibering_sign_changes(const DiscreteProblem& problem, const Eigen::VectorXd& x, double lo,
                                  double hi, std::size_t samples);

/// Projection of a ray onto the Nehari set.
struct NehariPoint {
  Eigen::VectorXd point;      // sigma * x / ||x||
  double sigma = 0.0;         // == ||point||
  double energy = 0.0;
  double nehari_residual = 0.0; // |I'(point) point|
  FiberingResult fibering;
};

NehariPoint nehari_project(const DiscreteProblem& problem, const Eigen::VectorXd& x,
                           double tol = 1e-10);
NehariPoint nehari_project(const DiscreteProblem& problem, const GridFunction& u, double tol = 1e-10);

struct OptimizerOptions {
  double gradient_tol = 1e-7;   // absolute, on the reduced gradient norm
  std::size_t max_iterations = 10000;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-12;
  double fibering_tol = 1e-10;
  /// Energy rounding noise in units of eps * |Phi|, used by the line search.
  double noise_ulps = 32.0;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double phi = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
};

struct ReducedResult {
  Eigen::VectorXd direction;     // unit vector in the problem norm
  NehariPoint nehari;
  double gradient_norm = 0.0;    // reduced (sphere) gradient
  double full_gradient_norm = 0.0; // ||I'(point)|| in the dual norm
  std::size_t iterations = 0;
  bool converged = false;
  std::string diagnosis;
  std::vector<IterationRecord> log;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Gradient descent of Phi(w) = I(m(w)) on the unit sphere of the problem
/// norm, with normalising retraction and Armijo backtracking. A step
/// underflow ends the run with converged = false and a diagnosis.
ReducedResult minimize_reduced(const DiscreteProblem& problem, const Eigen::VectorXd& start,
                               const OptimizerOptions& opts = {},
                               const IterationCallback& on_iteration = {});

} // namespace fracham
