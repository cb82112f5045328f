#include "fracham/nehari.hpp"

#include "fracham/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracham {

double energy(const DiscreteProblem& problem, const Eigen::VectorXd& x) {
  return 0.5 * problem.norm_sq(x) - problem.potential_integral(x);
}

double energy(const DiscreteProblem& problem, const GridFunction& u) {
  return energy(problem, problem.restrict(u));
}

EnergyGradient energy_gradient(const DiscreteProblem& problem, const Eigen::VectorXd& x) {
  EnergyGradient g;
  g.dual = problem.gram_apply(x) - problem.potential_gradient(x);
  g.riesz = problem.gram_solve(g.dual);
  return g;
}

GridFunction energy_gradient(const DiscreteProblem& problem, const GridFunction& u) {
  return problem.extend(energy_gradient(problem, problem.restrict(u)).riesz);
}

double fibering_derivative(const DiscreteProblem& problem, const Eigen::VectorXd& x, double sigma,
                           double norm_sq) {
  return sigma * norm_sq - problem.ray_slope(x, sigma);
}

FiberingResult fibering_sigma(const DiscreteProblem& problem, const Eigen::VectorXd& x, double tol,
                              std::size_t max_expansions) {
  const double q = problem.norm_sq(x);
  if (!(q > 0.0))
    throw std::invalid_argument("fibering_sigma: direction must be nonzero");

  auto dh = [&](double s) { return fibering_derivative(problem, x, s, q); };

  FiberingResult res;
  double lo = 1.0 / std::sqrt(q);
  double f_lo = dh(lo);
  double hi = lo;
  double f_hi = f_lo;
  std::size_t expansions = 0;
  if (f_lo > 0.0) {
    while (f_hi > 0.0) {
      if (++expansions > max_expansions)
        throw ConvergenceError("fibering_sigma: no upper bracket; the potential is not "
                               "numerically superquadratic along this ray");
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = dh(hi);
    }
  } else {
    while (f_lo <= 0.0) {
      if (++expansions > max_expansions)
        throw ConvergenceError("fibering_sigma: no lower bracket; the ray derivative is not "
                               "positive near zero");
      hi = lo;
      f_hi = f_lo;
      lo *= 0.5;
      f_lo = dh(lo);
    }
  }
  res.bracket = {lo, hi};

  double sigma = 0.0;
  if (f_hi == 0.0) {
    sigma = hi;
  } else {
    boost::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(
        dh, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
    res.iterations = static_cast<std::size_t>(iters);
    // Pick the end of the final bracket with the smaller residual.
    const double ra = std::abs(dh(root.first));
    const double rb = std::abs(dh(root.second));
    sigma = ra <= rb ? root.first : root.second;
  }
  res.sigma = sigma;
  res.derivative_residual = std::abs(dh(sigma));
  res.value = 0.5 * sigma * sigma * q - problem.potential_integral(x, sigma);

  // The two terms of h' cancel at the root, so rounding sets a floor.
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * sigma * q;
  if (res.derivative_residual > std::max(tol * q, floor))
    throw ConvergenceError("fibering_sigma: root refinement did not reach tolerance");
  return res;
}

FiberingResult fibering_sigma(const DiscreteProblem& problem, const GridFunction& u, double tol,
                              std::size_t max_expansions) {
  return fibering_sigma(problem, problem.restrict(u), tol, max_expansions);
}

std::size_t fibering_sign_changes(const DiscreteProblem& problem, const Eigen::VectorXd& x, double lo,
                                  double hi, std::size_t samples) {
  if (!(lo > 0.0 && hi > lo) || samples < 2)
    throw std::invalid_argument("fibering_sign_changes: need 0 < lo < hi and samples >= 2");
  const double q = problem.norm_sq(x);
  const double ratio = std::log(hi / lo) / static_cast<double>(samples - 1);
  std::size_t changes = 0;
  int prev = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = lo * std::exp(ratio * static_cast<double>(i));
    const double v = fibering_derivative(problem, x, s, q);
    const int sign = (v > 0.0) - (v < 0.0);
    if (sign == 0)
      continue;
    if (prev != 0 && sign != prev)
      ++changes;
    prev = sign;
  }
  return changes;
}

NehariPoint nehari_project(const DiscreteProblem& problem, const Eigen::VectorXd& x, double tol) {
  const double q = problem.norm_sq(x);
  if (!(q > 0.0))
    throw std::invalid_argument("nehari_project: direction must be nonzero");
  const Eigen::VectorXd w = x / std::sqrt(q);
  NehariPoint np;
  np.fibering = fibering_sigma(problem, w, tol);
  np.sigma = np.fibering.sigma;
  np.point = np.sigma * w;
  np.energy = np.fibering.value;
  // I'(s w) (s w) = s h'(s) for the unit direction w.
  np.nehari_residual = np.sigma * np.fibering.derivative_residual;
  return np;
}

NehariPoint nehari_project(const DiscreteProblem& problem, const GridFunction& u, double tol) {
  return nehari_project(problem, problem.restrict(u), tol);
}

ReducedResult minimize_reduced(const DiscreteProblem& problem, const Eigen::VectorXd& start,
                               const OptimizerOptions& opts, const IterationCallback& on_iteration) {
  const double q0 = problem.norm_sq(start);
  if (!(q0 > 0.0))
    throw std::invalid_argument("minimize_reduced: start must be nonzero");

  ReducedResult out;
  Eigen::VectorXd w = start / std::sqrt(q0);
  NehariPoint np = nehari_project(problem, w, opts.fibering_tol);

  for (std::size_t it = 0;; ++it) {
    const Eigen::VectorXd gw = problem.gram_apply(w);
    const double q = w.dot(gw);
    const double s = np.sigma;
    // Dual derivative of I at m = s w, and its Riesz representative.
    const Eigen::VectorXd r = s * gw - problem.potential_gradient(np.point);
    const Eigen::VectorXd g_full = problem.gram_solve(r);
    const double c = r.dot(w) / q;
    // Reduced gradient s * (g_full - c w) and its Gram image.
    const Eigen::VectorXd g = s * (g_full - c * w);
    const Eigen::VectorXd gg = s * (r - c * gw);
    const double gnorm = std::sqrt(std::max(0.0, g.dot(gg)));

    out.gradient_norm = gnorm;
    out.full_gradient_norm = std::sqrt(std::max(0.0, r.dot(g_full)));
    out.iterations = it;

    IterationRecord rec{it, np.energy, gnorm, 0.0};
    if (gnorm <= opts.gradient_tol) {
      out.converged = true;
      out.log.push_back(rec);
      if (on_iteration)
        on_iteration(rec);
      break;
    }
    if (it >= opts.max_iterations) {
      out.diagnosis = "iteration limit reached";
      out.log.push_back(rec);
      if (on_iteration)
        on_iteration(rec);
      break;
    }

    // Descent direction d = -g; retraction norm via Gram products.
    const double wgd = -w.dot(gg);
    const double dgd = gnorm * gnorm;
    double step = opts.initial_step;
    bool accepted = false;
    NehariPoint trial;
    Eigen::VectorXd w_new;
    // Below this level energy differences are rounding noise; a step whose
    // whole predicted decrease is that small is accepted if Phi does not
    // rise beyond the noise.
    const double noise = opts.noise_ulps * std::numeric_limits<double>::epsilon() * std::abs(np.energy);
    while (step >= opts.min_step) {
      const double n2 = q + 2.0 * step * wgd + step * step * dgd;
      w_new = (w - step * g) / std::sqrt(n2);
      trial = nehari_project(problem, w_new, opts.fibering_tol);
      if (trial.energy <= np.energy - opts.armijo * step * dgd ||
          (step * dgd <= noise && trial.energy <= np.energy + noise)) {
        accepted = true;
        break;
      }
      step *= opts.shrink;
    }
    rec.step = accepted ? step : 0.0;
    out.log.push_back(rec);
    if (on_iteration)
      on_iteration(rec);
    if (!accepted) {
      out.diagnosis = "line search step underflow";
      break;
    }
    w = w_new;
    np = std::move(trial);
  }

  out.direction = w;
  out.nehari = std::move(np);
  return out;
}

} // namespace fracham
