#include "fracham/concentration.hpp"

#include "fracham/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fracham {

GridFunction bump_in(const Grid1D& grid, const Interval& T, std::size_t n_components) {
  GridFunction u(grid, n_components);
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    const double t = grid.t(i);
    if (t <= T.lo || t >= T.hi)
      continue;
    const double s = std::sin(std::numbers::pi * (t - T.lo) / T.length());
    for (std::size_t c = 0; c < n_components; ++c)
      u(i, c) = s * s;
  }
  return u;
}

double bump_energy_bound(const DiscreteProblem& problem, const GridFunction& phi0, const Interval& T) {
  const Grid1D& g = phi0.grid();
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    if (!T.contains(g.t(i)) && phi0.magnitude(i) != 0.0)
      throw std::invalid_argument("bump_energy_bound: phi0 is nonzero outside T");
  return fibering_sigma(problem, phi0).value;
}

double tail_mass_fraction(const GridFunction& u, const Interval& T) {
  const Grid1D& g = u.grid();
  double out = 0.0, total = 0.0;
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const double m = u.magnitude(i);
    total += m * m;
    if (!T.contains(g.t(i)))
      out += m * m;
  }
  return total > 0.0 ? out / total : 0.0;
}

GridFunction zero_extend(const GridFunction& u, const Grid1D& target) {
  const Grid1D& g = u.grid();
  if (std::abs(g.h() - target.h()) > 1e-12 * target.h())
    throw std::invalid_argument("zero_extend: grid spacings differ");
  const std::size_t off = target.aligned_index(g.a());
  if (off + g.n_nodes() > target.n_nodes())
    throw std::invalid_argument("zero_extend: source grid exceeds target");
  GridFunction v(target, u.n_components());
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    for (std::size_t c = 0; c < u.n_components(); ++c)
      v(off + i, c) = u(i, c);
  return v;
}

namespace {

SweepRecord make_record(const DiscreteProblem& problem, const GroundState& gs, const GridFunction& u_tilde_ext,
                        double theta, double bump_bound, const Interval& T) {
  SweepRecord r;
  r.lambda = gs.lambda;
  r.c_lambda = gs.energy;
  r.x_norm_sq = gs.x_norm * gs.x_norm;
  r.tail_mass_fraction = tail_mass_fraction(gs.u, T);
  // Ground states come in +- pairs; compare against the nearer sign.
  const FracOrder order = problem.order();
  const double d_plus = h_alpha_norm(gs.u - u_tilde_ext, order);
  const double d_minus = h_alpha_norm(gs.u + u_tilde_ext, order);
  r.h_alpha_distance = std::min(d_plus, d_minus);
  r.bound_ratio = r.x_norm_sq * (theta - 2.0) / (2.0 * theta * bump_bound);
  const Eigen::VectorXd x = problem.restrict(gs.u);
  r.weighted_mass = problem.scalar_weighted_mass(x);
  r.weighted_mass_bound = r.x_norm_sq / gs.lambda;
  r.gradient_norm = gs.gradient_norm;
  r.strong_residual = gs.strong_residual;
  r.rho_observed = gs.rho_observed;
  r.multistart_spread = gs.multistart_spread;
  r.boundary_magnitude = gs.boundary_magnitude;
  r.starts = gs.starts.size();
  return r;
}

void compute_flags(SweepReport& rep, const SweepOptions& opts) {
  auto& f = rep.flags;
  const auto& rs = rep.records;
  f = SweepFlags{};
  f.c_lambda_nondecreasing = f.c_lambda_below_c_tilde = f.c_lambda_below_bump_bound = true;
  f.energy_above_rho = f.bound_ratio_ok = f.weighted_mass_ok = true;
  f.tail_mass_decreasing = f.h_alpha_nonincreasing = true;
  auto note = [&](const std::string& s) { rep.violations.push_back(s); };
  char buf[256];
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const SweepRecord& r = rs[k];
    if (!(r.c_lambda <= rep.c_tilde + opts.energy_tol)) {
      f.c_lambda_below_c_tilde = false;
      std::snprintf(buf, sizeof buf, "lambda=%g: c_lambda=%.12g exceeds c_tilde=%.12g", r.lambda, r.c_lambda,
                    rep.c_tilde);
      note(buf);
    }
    if (!(r.c_lambda <= rep.bump_bound + opts.energy_tol)) {
      f.c_lambda_below_bump_bound = false;
      std::snprintf(buf, sizeof buf, "lambda=%g: c_lambda=%.12g exceeds the bump bound %.12g", r.lambda,
                    r.c_lambda, rep.bump_bound);
      note(buf);
    }
    if (!(r.c_lambda >= r.rho_observed && r.rho_observed > 0.0)) {
      f.energy_above_rho = false;
      std::snprintf(buf, sizeof buf, "lambda=%g: c_lambda=%.12g below rho_observed=%.12g", r.lambda,
                    r.c_lambda, r.rho_observed);
      note(buf);
    }
    if (!(r.bound_ratio <= 1.0 + opts.bound_tol)) {
      f.bound_ratio_ok = false;
      std::snprintf(buf, sizeof buf, "lambda=%g: bound_ratio=%.12g > 1", r.lambda, r.bound_ratio);
      note(buf);
    }
    if (!(r.weighted_mass <= r.weighted_mass_bound)) {
      f.weighted_mass_ok = false;
      std::snprintf(buf, sizeof buf, "lambda=%g: weighted mass %.12g exceeds %.12g", r.lambda,
                    r.weighted_mass, r.weighted_mass_bound);
      note(buf);
    }
    if (k == 0)
      continue;
    const SweepRecord& p = rs[k - 1];
    if (!(r.c_lambda >= p.c_lambda - opts.energy_tol)) {
      f.c_lambda_nondecreasing = false;
      std::snprintf(buf, sizeof buf, "c_lambda decreases from %.12g to %.12g at lambda=%g", p.c_lambda,
                    r.c_lambda, r.lambda);
      note(buf);
    }
    if (!(r.tail_mass_fraction < p.tail_mass_fraction)) {
      f.tail_mass_decreasing = false;
      std::snprintf(buf, sizeof buf, "tail mass fraction does not decrease at lambda=%g (%.6g -> %.6g)",
                    r.lambda, p.tail_mass_fraction, r.tail_mass_fraction);
      note(buf);
    }
    if (!(r.h_alpha_distance <= p.h_alpha_distance)) {
      f.h_alpha_nonincreasing = false;
      std::snprintf(buf, sizeof buf, "(soft) H^alpha distance increases at lambda=%g (%.6g -> %.6g)",
                    r.lambda, p.h_alpha_distance, r.h_alpha_distance);
      note(buf);
    }
  }
}

} // namespace

SweepReport run_sweep(const std::vector<double>& lambdas, const ProblemConfig& config,
                      const SweepOptions& opts) {
  if (lambdas.empty())
    throw ConfigError("run_sweep: lambda list is empty");
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    if (!(lambdas[k] > 0.0) || (k > 0 && !(lambdas[k] > lambdas[k - 1])))
      throw ConfigError("run_sweep: lambdas must be positive and strictly ascending");
  check_config(config);

  SweepReport rep;
  const EmbeddingEstimate est = embedding_for(config);
  if (config.validate)
    validate_config(config, est);
  for (double l : lambdas)
    if (l < est.lambda_threshold) {
      std::ostringstream msg;
      msg << "lambda=" << l << " is below the embedding threshold " << est.lambda_threshold;
      rep.violations.push_back(msg.str());
    }

  SolveOptions base;
  base.skip_validation = true;
  try {
    rep.bvp = solve_bvp(config, base);
  } catch (const std::exception& e) {
    rep.error = std::string("BVP solve failed: ") + e.what();
    return rep;
  }
  rep.c_tilde = rep.bvp->energy;
  const GridFunction u_tilde_ext = zero_extend(rep.bvp->u, config.grid);
  rep.u_tilde_h_alpha = h_alpha_norm(u_tilde_ext, config.order);

  const GridFunction phi0 = bump_in(config.grid, config.weight.T, config.n_components);
  const double theta = config.potential.theta;

  auto solve_at = [&](std::size_t k, const GridFunction* warm, bool fresh_multistart)
      -> std::pair<GroundState, SweepRecord> {
    const DiscreteProblem problem = line_problem(config, lambdas[k]);
    SolveOptions so = base;
    so.lambda = lambdas[k];
    so.problem = &problem;
    if (warm) {
      so.warm_starts.push_back(problem.restrict(*warm));
      if (fresh_multistart)
        for (std::size_t i = 0; i < config.multistart; ++i)
          so.warm_starts.push_back(random_start(problem, config.weight.T, config.seed, i));
    }
    GroundState gs = solve_line(config, so);
    const double c0 = bump_energy_bound(problem, phi0, config.weight.T);
    SweepRecord rec = make_record(problem, gs, u_tilde_ext, theta, c0, config.weight.T);
    return {std::move(gs), rec};
  };

  {
    // The bump bound is evaluated once on the first lambda's problem.
    const DiscreteProblem p0 = line_problem(config, lambdas.front());
    rep.bump_bound = bump_energy_bound(p0, phi0, config.weight.T);
  }

  const std::size_t n = lambdas.size();
  std::vector<std::optional<std::pair<GroundState, SweepRecord>>> out(n);
  if (opts.warm_start) {
    for (std::size_t k = 0; k < n; ++k) {
      try {
        if (k == 0) {
          out[k] = solve_at(k, nullptr, false);
        } else {
          out[k] = solve_at(k, &out[k - 1]->first.u, k + 1 == n);
        }
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "line solve failed at lambda=" << lambdas[k] << ": " << e.what();
        rep.error = msg.str();
        break;
      }
    }
  } else {
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          out[k] = solve_at(k, nullptr, false);
        } catch (const std::exception& e) {
          errors[k] = e.what();
        }
      }
    };
    const std::size_t nt = std::max<std::size_t>(1, std::min(config.threads, n));
    if (nt == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t i = 0; i < nt; ++i)
        pool.emplace_back(worker);
    }
    for (std::size_t k = 0; k < n; ++k)
      if (!errors[k].empty()) {
        std::ostringstream msg;
        msg << "line solve failed at lambda=" << lambdas[k] << ": " << errors[k];
        rep.error = msg.str();
        break;
      }
  }

  for (std::size_t k = 0; k < n && out[k]; ++k) {
    rep.records.push_back(out[k]->second);
    rep.states.push_back(std::move(out[k]->first));
  }
  rep.complete = rep.error.empty() && rep.records.size() == n;
  compute_flags(rep, opts);
  return rep;
}

void write_comment_block(std::ostream& os, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    os << "# " << line << '\n';
}

void write_sweep_csv(std::ostream& os, const SweepReport& report, const std::string& preamble) {
  write_comment_block(os, preamble);
  os << kSweepCsvHeader << '\n';
  char buf[512];
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.lambda, r.c_lambda, r.x_norm_sq,
                  r.tail_mass_fraction, r.h_alpha_distance, r.bound_ratio);
    os << buf;
  }
}

std::string sweep_summary(const SweepReport& report) {
  std::ostringstream os;
  char buf[512];
  os << "sweep " << (report.complete ? "complete" : "INCOMPLETE") << '\n';
  if (!report.error.empty())
    os << "error: " << report.error << '\n';
  std::snprintf(buf, sizeof buf, "c_tilde = %.12g\nbump bound = %.12g\n||u_tilde||_H^alpha = %.12g\n",
                report.c_tilde, report.bump_bound, report.u_tilde_h_alpha);
  os << buf;
  os << "records:\n";
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof buf,
                  "  lambda=%-10g c=%.10f |u|^2=%.10f tail=%.4e dist=%.4e ratio=%.6f |g|=%.2e starts=%zu\n",
                  r.lambda, r.c_lambda, r.x_norm_sq, r.tail_mass_fraction, r.h_alpha_distance, r.bound_ratio,
                  r.gradient_norm, r.starts);
    os << buf;
  }
  const auto& f = report.flags;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  os << "flags:\n"
     << "  c_lambda nondecreasing:        " << yn(f.c_lambda_nondecreasing) << '\n'
     << "  c_lambda <= c_tilde:           " << yn(f.c_lambda_below_c_tilde) << '\n'
     << "  c_lambda <= bump bound:        " << yn(f.c_lambda_below_bump_bound) << '\n'
     << "  c_lambda >= rho_observed:      " << yn(f.energy_above_rho) << '\n'
     << "  bound_ratio <= 1:              " << yn(f.bound_ratio_ok) << '\n'
     << "  weighted mass inequality:      " << yn(f.weighted_mass_ok) << '\n'
     << "  tail mass strictly decreasing: " << yn(f.tail_mass_decreasing) << '\n'
     << "  H^alpha distance nonincreasing (soft): " << yn(f.h_alpha_nonincreasing) << '\n';
  if (!report.violations.empty()) {
    os << "violations:\n";
    for (const auto& v : report.violations)
      os << "  " << v << '\n';
  }
  return os.str();
}

void write_profile(std::ostream& os, const GridFunction& u, const std::string& preamble) {
  write_comment_block(os, preamble);
  char buf[64];
  for (std::size_t i = 0; i < u.n_nodes(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", u.grid().t(i));
    os << buf;
    for (std::size_t c = 0; c < u.n_components(); ++c) {
      std::snprintf(buf, sizeof buf, " %.17g", u(i, c));
      os << buf;
    }
    os << '\n';
  }
}

} // namespace fracham
