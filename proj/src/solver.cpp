#include "fracham/solver.hpp"

#include "fracham/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace fracham {

std::string to_string(DerivativeExtent e) {
  return e == DerivativeExtent::line ? "line" : "interval";
}

DerivativeExtent derivative_extent_from_string(const std::string& s) {
  if (s == "line")
    return DerivativeExtent::line;
  if (s == "interval")
    return DerivativeExtent::interval;
  throw ConfigError("unknown derivative extent '" + s + "' (expected line or interval)");
}

ProblemConfig reference_config() {
  ProblemConfig c;
  c.order = FracOrder(0.75);
  c.lambda = 100.0;
  c.truncation_R = 8.0;
  c.grid = Grid1D(-8.0, 8.0, 2049);
  c.t_end = 1.0;
  c.n_components = 1;
  c.potential = builtin_potential(3.0, 1.0, constant_profile(1.0));
  c.weight = builtin_weight(1, 1.0, 100.0, {0.0, 1.0}, 0.1, {0.0, 1.0}, c_inf_sharp(c.order));
  return c;
}

void check_config(const ProblemConfig& config) {
  try {
    config.order.require_problem_range();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const Grid1D& g = config.grid;
  const double R = config.truncation_R;
  if (!(R > 0.0) || std::abs(g.a() + R) > 1e-12 * R || std::abs(g.b() - R) > 1e-12 * R)
    throw ConfigError("line grid must span [-R, R]");
  const Interval& T = config.weight.T;
  if (!(T.lo > -R && T.hi < R && T.lo < T.hi))
    throw ConfigError("T must lie strictly inside (-R, R)");
  if (T.lo != 0.0 || std::abs(T.hi - config.t_end) > 1e-12)
    throw ConfigError("T must equal [0, t_end]");
  if (config.n_components != config.weight.n_components)
    throw ConfigError("weight and problem component counts differ");
  try {
    const std::size_t i0 = g.aligned_index(T.lo);
    const std::size_t i1 = g.aligned_index(T.hi);
    if (i1 - i0 + 1 < 64)
      throw ConfigError("grid resolves T with fewer than 64 nodes");
  } catch (const std::invalid_argument&) {
    throw ConfigError("the ends of T must be grid nodes");
  }
  if (!config.potential.W)
    throw ConfigError("potential is not set");
  if (config.multistart == 0)
    throw ConfigError("multistart count must be positive");
}

Grid1D bvp_grid(const ProblemConfig& config) {
  const Grid1D& g = config.grid;
  const std::size_t i0 = g.aligned_index(0.0);
  const std::size_t i1 = g.aligned_index(config.t_end);
  return Grid1D(0.0, config.t_end, i1 - i0 + 1);
}

DiscreteProblem line_problem(const ProblemConfig& config, double lambda) {
  DiscreteProblem::Setup s;
  s.order = config.order;
  s.grid = config.grid;
  s.n_components = config.n_components;
  s.lambda = lambda;
  s.potential = config.potential;
  s.weight = config.weight;
  return DiscreteProblem(std::move(s));
}

DiscreteProblem bvp_problem(const ProblemConfig& config) {
  DiscreteProblem::Setup s;
  s.order = config.order;
  s.grid = bvp_grid(config);
  s.n_components = config.n_components;
  s.lambda = 0.0;
  s.potential = config.potential;
  if (config.bvp_extent == DerivativeExtent::line) {
    const std::size_t i1 = config.grid.aligned_index(config.t_end);
    s.tail_rows = config.grid.n_nodes() - 1 - i1;
  }
  return DiscreteProblem(std::move(s));
}

Eigen::VectorXd random_start(const DiscreteProblem& problem, const Interval& support, std::uint64_t seed,
                             std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double len = support.length();
  struct Bump {
    double centre, width, amp;
  };
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    b.centre = support.lo + len * unit(rng);
    b.width = len * 0.05 * std::pow(10.0, unit(rng));
    b.amp = 0.2 + 0.8 * unit(rng);
  }
  std::vector<double> dir(problem.n_components());
  for (auto& d : dir)
    d = 0.2 + unit(rng);

  const Grid1D& g = problem.grid();
  GridFunction u(g, problem.n_components());
  for (std::size_t i = 1; i + 1 < g.n_nodes(); ++i) {
    const double t = g.t(i);
    double v = 0.0;
    for (const auto& b : bumps) {
      const double z = (t - b.centre) / b.width;
      v += b.amp * std::exp(-0.5 * z * z);
    }
    v *= std::sin(std::numbers::pi * (t - g.a()) / (g.b() - g.a()));
    for (std::size_t c = 0; c < dir.size(); ++c)
      u(i, c) = v * dir[c];
  }
  return problem.restrict(u);
}

MultistartResult multistart(const DiscreteProblem& problem, const std::vector<Eigen::VectorXd>& starts,
                            const OptimizerOptions& opts, std::size_t threads) {
  const std::size_t n = starts.size();
  std::vector<ReducedResult> results(n);
  std::vector<double> initial_nu(n, 0.0);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        initial_nu[k] = nehari_project(problem, starts[k], opts.fibering_tol).sigma;
        results[k] = minimize_reduced(problem, starts[k], opts);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const std::size_t nt = std::max<std::size_t>(1, std::min(threads, n));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < nt; ++i)
      pool.emplace_back(worker);
  }

  MultistartResult out;
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k)
    order[k] = k;
  auto energy_of = [&](std::size_t k) {
    return errors[k].empty() ? results[k].nehari.energy : std::numeric_limits<double>::infinity();
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ea = energy_of(a), eb = energy_of(b);
    return ea != eb ? ea < eb : a < b;
  });

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double nu = std::numeric_limits<double>::infinity();
  for (std::size_t k : order) {
    StartRecord rec;
    rec.index = k;
    if (!errors[k].empty()) {
      rec.energy = std::numeric_limits<double>::quiet_NaN();
      rec.diagnosis = errors[k];
    } else {
      const ReducedResult& r = results[k];
      rec.energy = r.nehari.energy;
      rec.gradient_norm = r.gradient_norm;
      rec.x_norm = r.nehari.sigma;
      rec.iterations = r.iterations;
      rec.converged = r.converged;
      rec.diagnosis = r.diagnosis;
      nu = std::min({nu, initial_nu[k], r.nehari.sigma});
      if (r.converged) {
        ++out.converged;
        lo = std::min(lo, rec.energy);
        hi = std::max(hi, rec.energy);
      }
    }
    out.starts.push_back(rec);
    out.results.push_back(std::move(results[k]));
  }
  out.spread = out.converged > 0 ? hi - lo : std::numeric_limits<double>::quiet_NaN();
  out.nu_observed = nu;
  return out;
}

std::size_t GroundState::converged_count() const {
  return static_cast<std::size_t>(
      std::count_if(starts.begin(), starts.end(), [](const StartRecord& s) { return s.converged; }));
}

double strong_residual(const DiscreteProblem& problem, const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = problem.strong_form_residual(x);
  return std::sqrt(std::max(0.0, r.dot(problem.gram_solve(r))));
}

double strong_residual(const DiscreteProblem& problem, const GridFunction& u) {
  return strong_residual(problem, problem.restrict(u));
}

double boundary_magnitude(const GridFunction& u, double layer) {
  const Grid1D& g = u.grid();
  const double peak = u.max_magnitude();
  if (peak == 0.0)
    return 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const double t = g.t(i);
    if (t - g.a() <= layer || g.b() - t <= layer)
      edge = std::max(edge, u.magnitude(i));
  }
  return edge / peak;
}

EmbeddingEstimate embedding_for(const ProblemConfig& config) {
  EmbeddingEstimate est = estimate_c_inf(config.order, config.c_inf_samples, config.seed);
  const double meas = config.weight.sublevel_measure
                          ? *config.weight.sublevel_measure
                          : sublevel_measure_on_grid(config.weight, config.grid.a(), config.grid.b(),
                                                     100001);
  return complete_embedding(est, config.weight, meas, config.c_inf_override);
}

ValidationReport validate_config(const ProblemConfig& config, const EmbeddingEstimate& est) {
  const SamplePlan plan = default_sample_plan(config.weight, est.c_inf, static_cast<unsigned>(config.seed));
  ValidationReport report = validate_hypotheses(config.potential, config.weight, plan);
  if (!report.all_pass()) {
    std::ostringstream msg;
    msg << "hypothesis validation failed:";
    for (const auto& c : report.checks)
      if (c.status == CheckStatus::fail)
        msg << " [" << c.name << ": " << c.message << "]";
    throw ValidationError(msg.str());
  }
  return report;
}

namespace {

std::vector<Eigen::VectorXd> make_starts(const DiscreteProblem& problem, const ProblemConfig& config,
                                         const SolveOptions& opts) {
  if (!opts.warm_starts.empty())
    return opts.warm_starts;
  const std::size_t count = opts.multistart.value_or(config.multistart);
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    starts.push_back(random_start(problem, config.weight.T, config.seed, k));
  return starts;
}

GroundState finish(const DiscreteProblem& problem, const ProblemConfig& config, MultistartResult ms) {
  if (ms.converged == 0) {
    std::ostringstream msg;
    msg << "no start converged;";
    for (const auto& s : ms.starts)
      msg << " start " << s.index << ": " << (s.diagnosis.empty() ? "not converged" : s.diagnosis)
          << " (|g| = " << s.gradient_norm << ");";
    throw ConvergenceError(msg.str());
  }
  std::size_t best = 0;
  while (!ms.starts[best].converged)
    ++best;
  const ReducedResult& r = ms.results[best];

  GroundState gs;
  gs.u = problem.extend(r.nehari.point);
  gs.energy = r.nehari.energy;
  gs.gradient_norm = r.gradient_norm;
  gs.full_gradient_norm = r.full_gradient_norm;
  gs.nehari_residual = r.nehari.nehari_residual;
  gs.strong_residual = strong_residual(problem, r.nehari.point);
  gs.x_norm = r.nehari.sigma;
  gs.multistart_spread = ms.spread;
  gs.nu_observed = ms.nu_observed;
  const double theta = config.potential.theta;
  gs.rho_observed = (0.5 - 1.0 / theta) * ms.nu_observed * ms.nu_observed;
  gs.log = r.log;
  gs.starts = std::move(ms.starts);
  if (!(gs.energy >= gs.rho_observed && gs.rho_observed > 0.0))
    gs.warnings.push_back("energy below the observed lower bound (1/2 - 1/theta) nu^2");
  if (gs.converged_count() < gs.starts.size())
    gs.warnings.push_back("some starts did not converge");
  return gs;
}

} // namespace

GroundState solve_line(const ProblemConfig& config, const SolveOptions& opts) {
  check_config(config);
  const double lambda = opts.lambda.value_or(config.lambda);
  if (!(lambda > 0.0))
    throw ConfigError("lambda must be positive");

  const EmbeddingEstimate est = embedding_for(config);
  std::optional<ValidationReport> report;
  if (config.validate && !opts.skip_validation)
    report = validate_config(config, est);

  std::optional<DiscreteProblem> owned;
  const DiscreteProblem* problem = opts.problem;
  if (!problem) {
    owned.emplace(line_problem(config, lambda));
    problem = &*owned;
  } else if (problem->lambda() != lambda || !problem->has_weight()) {
    throw std::invalid_argument("solve_line: prebuilt problem does not match lambda");
  }

  const auto starts = make_starts(*problem, config, opts);
  GroundState gs = finish(*problem, config, multistart(*problem, starts, config.optimizer, config.threads));
  gs.lambda = lambda;
  gs.validation = std::move(report);
  gs.embedding = est;
  if (lambda < est.lambda_threshold) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " is below the embedding threshold " << est.lambda_threshold;
    gs.warnings.push_back(msg.str());
  }
  gs.boundary_magnitude = boundary_magnitude(gs.u, config.boundary_layer);
  if (gs.boundary_magnitude > config.boundary_tol) {
    std::ostringstream msg;
    msg << "ground state reaches the truncation boundary (relative magnitude "
        << gs.boundary_magnitude << " > " << config.boundary_tol << "); increase truncation_R";
    throw ConvergenceError(msg.str());
  }
  return gs;
}

GroundState solve_bvp(const ProblemConfig& config, const SolveOptions& opts) {
  check_config(config);
  std::optional<ValidationReport> report;
  std::optional<EmbeddingEstimate> est;
  if (config.validate && !opts.skip_validation) {
    est = embedding_for(config);
    report = validate_config(config, *est);
  }
  std::optional<DiscreteProblem> owned;
  const DiscreteProblem* problem = opts.problem;
  if (!problem) {
    owned.emplace(bvp_problem(config));
    problem = &*owned;
  }
  const auto starts = make_starts(*problem, config, opts);
  GroundState gs = finish(*problem, config, multistart(*problem, starts, config.optimizer, config.threads));
  gs.lambda = 0.0;
  gs.validation = std::move(report);
  gs.embedding = est;
  gs.boundary_magnitude = std::max(gs.u.magnitude(0), gs.u.magnitude(gs.u.n_nodes() - 1));
  gs.interval_bounds = check_interval_inequalities(gs.u, config.order, 2.0);
  return gs;
}

double small_amplitude_radius(const PotentialSpec& pot, double eps, const std::vector<double>& t_samples,
                              std::size_t n_components) {
  if (!(eps > 0.0) || t_samples.empty())
    throw std::invalid_argument("small_amplitude_radius: need eps > 0 and sample times");
  std::vector<double> u(n_components, 0.0);
  auto ok = [&](double d) {
    u[0] = d;
    for (double t : t_samples)
      if (pot.W(t, u) > eps * d * d)
        return false;
    return true;
  };
  double lo = 1e-12, hi = 1.0;
  if (!ok(lo))
    throw std::invalid_argument("small_amplitude_radius: W is not o(|u|^2) at the origin");
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12)
      return lo;
  }
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

MountainPassCheck check_mountain_pass(const DiscreteProblem& problem, const EmbeddingEstimate& est,
                                      const std::vector<Eigen::VectorXd>& directions) {
  MountainPassCheck mp;
  mp.theta_const = est.theta_const;
  if (!(mp.theta_const > 0.0))
    throw std::invalid_argument("check_mountain_pass: embedding constant Theta must be positive");
  mp.eps = mp.theta_const / 4.0;
  std::vector<double> ts;
  const Grid1D& g = problem.grid();
  for (std::size_t i = 0; i < g.n_nodes(); i += std::max<std::size_t>(1, g.n_nodes() / 64))
    ts.push_back(g.t(i));
  mp.delta = small_amplitude_radius(problem.potential(), mp.eps, ts, problem.n_components());
  mp.rho = mp.delta / (est.c_inf * std::sqrt(1.0 + 1.0 / mp.theta_const));
  mp.beta = (0.5 - mp.eps / mp.theta_const) * mp.rho * mp.rho;
  mp.min_energy = std::numeric_limits<double>::infinity();
  for (const auto& d : directions) {
    const double q = problem.norm_sq(d);
    mp.min_energy = std::min(mp.min_energy, energy(problem, Eigen::VectorXd(mp.rho / std::sqrt(q) * d)));
  }
  mp.holds = mp.min_energy >= mp.beta;
  return mp;
}

} // namespace fracham
