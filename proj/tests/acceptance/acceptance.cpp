// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "fracham/concentration.hpp"
#include "fracham/errors.hpp"
#include "fracham/solver.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fracham;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Eigen::VectorXd sine_direction(const DiscreteProblem& p, std::mt19937_64& rng, double lo, double hi) {
  GridFunction u(p.grid(), p.n_components());
  for (std::size_t c = 0; c < p.n_components(); ++c) {
    const oracle::SineSeries s = oracle::random_sine_series(rng, lo, hi);
    for (std::size_t i = 0; i < p.grid().n_nodes(); ++i)
      u(i, c) = s(p.grid().t(i));
  }
  return p.restrict(u);
}

Outcome operator_accuracy() {
  const auto t0 = Clock::now();
  const FracOrder order(0.7);
  auto max_error = [&](std::size_t n) {
    const Grid1D g(0.0, 1.0, n + 1);
    const GridFunction u = GridFunction::sample(g, [](double t) { return t * t; });
    const GridFunction d = left_frac_derivative(u, order);
    double err = 0.0;
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
      const double t = g.t(i);
      if (t < 0.1 - 1e-12 || t > 0.9 + 1e-12)
        continue;
      const double exact = oracle::power_rule(2.0, 0.7, t);
      err = std::max(err, std::abs(d(i, 0) - exact) / exact);
    }
    return err;
  };
  const double e1 = max_error(1024);
  const double e2 = max_error(2048);
  const double ratio = e1 / e2;
  const double dt = seconds_since(t0);
  return {e1 < 2e-2 && ratio >= 1.7 && ratio <= 2.3 && dt < 1.0,
          fmt("max rel error %.3e at N=1024, ratio N/2N %.3f, %.2fs", e1, ratio, dt)};
}

Outcome adjointness_and_spectral() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size(16, 1024);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = size(rng);
    const Grid1D g(-1.0, 1.0, n);
    GridFunction u(g, 1), v(g, 1);
    const std::size_t lo = n / 8, hi = n - n / 8;
    for (std::size_t i = lo; i < hi; ++i) {
      u(i, 0) = normal(rng);
      v(i, 0) = normal(rng);
    }
    const FracOrder order(0.55 + 0.45 * (k % 10) / 10.0);
    const GridFunction du = left_frac_derivative(u, order);
    const GridFunction dv = right_frac_derivative(v, order);
    double a = 0, b = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a += g.h() * du(i, 0) * v(i, 0);
      b += g.h() * u(i, 0) * dv(i, 0);
      nu += g.h() * u(i, 0) * u(i, 0);
      nv += g.h() * v(i, 0) * v(i, 0);
    }
    worst = std::max(worst, std::abs(a - b) / std::sqrt(nu * nv));
  }
  const Grid1D g(-20.0, 20.0, 8193);
  const GridFunction bump = GridFunction::sample(g, [](double t) { return std::exp(-0.5 * t * t); });
  double spectral = 0.0;
  for (double alpha : {0.6, 0.75, 0.9}) {
    const double e = StiffnessForm(FracOrder(alpha), g).energy(bump);
    const double f = fourier_seminorm(bump, FracOrder(alpha));
    spectral = std::max(spectral, std::abs(e - f * f) / (f * f));
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-8 && spectral < 0.02 && dt < 5.0,
          fmt("adjointness defect %.2e (100 pairs), stiffness vs Fourier max rel diff %.2e, %.2fs", worst,
              spectral, dt)};
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  const ProblemConfig c = reference_config();
  const DiscreteProblem p = line_problem(c, 100.0);
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd x = 2.0 * sine_direction(p, rng, -1.0, 2.0);
    const Eigen::VectorXd v = sine_direction(p, rng, -1.5, 2.5);
    const double analytic = energy_gradient(p, x).dual.dot(v);
    const double eps = 1e-5;
    const double fd =
        (energy(p, Eigen::VectorXd(x + eps * v)) - energy(p, Eigen::VectorXd(x - eps * v))) / (2.0 * eps);
    worst = std::max(worst, std::abs(fd - analytic) / std::abs(analytic));
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-5 && dt < 5.0, fmt("max rel FD error %.2e over 10 pairs, %.2fs", worst, dt)};
}

Outcome fibering_map() {
  const auto t0 = Clock::now();
  ProblemConfig c = reference_config();
  const double theta = c.potential.theta;
  std::mt19937_64 rng(3);

  c.potential = power_potential(theta, constant_profile(1.0));
  const DiscreteProblem hom = line_problem(c, 100.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd x = sine_direction(hom, rng, -2.0, 3.0);
    const double q = hom.norm_sq(x);
    const double P = hom.potential_integral(x);
    const double expected = oracle::power_fibering_sigma(q, P, theta);
    worst = std::max(worst, std::abs(fibering_sigma(hom, x).sigma - expected) / expected);
  }

  const DiscreteProblem strict = line_problem(reference_config(), 100.0);
  std::size_t unique = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd x = sine_direction(strict, rng, -2.0, 3.0);
    const FiberingResult f = fibering_sigma(strict, x);
    const double lo = std::min(f.bracket.first, f.sigma) * 1e-3;
    const double hi = std::max(f.bracket.second, f.sigma) * 1e3;
    unique += fibering_sign_changes(strict, x, lo, hi, 600) == 1;
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-8 && unique == 100 && dt < 10.0,
          fmt("closed-form sigma max rel error %.2e (20 dirs), unique sign change %zu/100, %.2fs", worst,
              unique, dt)};
}

Outcome bvp_ground_state() {
  const auto t0 = Clock::now();
  const ProblemConfig c = reference_config();
  const GroundState gs = solve_bvp(c);
  double spread = 0.0;
  for (const auto& s : gs.starts)
    if (s.converged)
      spread = std::max(spread, s.energy - gs.energy);
  const bool all_converged = gs.converged_count() == gs.starts.size() && gs.starts.size() == 20;
  const IntervalBounds& b = *gs.interval_bounds;

  ProblemConfig fine = c;
  fine.grid = Grid1D(-c.truncation_R, c.truncation_R, 2 * (c.grid.n_nodes() - 1) + 1);
  fine.validate = false;
  const GroundState gf = solve_bvp(fine, {.multistart = 4});
  const double refine = std::abs(gf.energy - gs.energy) / gf.energy;
  const double dt = seconds_since(t0);
  return {all_converged && spread <= 1e-6 && gs.full_gradient_norm < 1e-6 && b.lp_holds && b.linf_holds &&
              refine < 0.02 && dt < 60.0,
          fmt("c~=%.10f, %zu/%zu converged, spread %.1e, |I'|=%.1e, L2 %.4f<=%.4f, sup %.4f<=%.4f, "
              "N->2N change %.2e, %.1fs",
              gs.energy, gs.converged_count(), gs.starts.size(), spread, gs.full_gradient_norm, b.lp,
              b.lp_bound, b.linf, b.linf_bound, refine, dt)};
}

struct SweepRun {
  SweepReport report;
  std::string csv;
  double seconds = 0.0;
};

SweepRun run_reference_sweep() {
  const auto t0 = Clock::now();
  SweepRun r;
  r.report = run_sweep({10.0, 100.0, 1000.0, 10000.0}, reference_config());
  std::ostringstream os;
  write_sweep_csv(os, r.report, "reference sweep, seed 20240601");
  r.csv = os.str();
  r.seconds = seconds_since(t0);
  return r;
}

Outcome energy_ordering(const SweepRun& s) {
  const SweepReport& r = s.report;
  bool ok = r.complete && r.records.size() == 4;
  double prev = -1.0;
  std::string rows;
  for (const auto& rec : r.records) {
    ok = ok && rec.c_lambda <= r.c_tilde + 1e-8 && rec.c_lambda >= prev;
    ok = ok && rec.c_lambda >= rec.rho_observed && rec.rho_observed > 0.0 && rec.c_lambda <= r.bump_bound;
    prev = rec.c_lambda;
    rows += fmt(" %.0e:%.6f", rec.lambda, rec.c_lambda);
  }
  ok = ok && s.seconds < 300.0;
  return {ok, fmt("c_lambda", 0) + rows + fmt(" <= c~=%.6f <= bump bound %.6f, %.1fs", r.c_tilde, r.bump_bound,
                                               s.seconds)};
}

Outcome a_priori_bound(const SweepRun& s) {
  const SweepReport& r = s.report;
  bool ok = r.complete && !r.records.empty();
  double worst_ratio = 0.0;
  for (const auto& rec : r.records) {
    ok = ok && rec.bound_ratio <= 1.0 + 1e-6 && rec.weighted_mass <= rec.weighted_mass_bound;
    worst_ratio = std::max(worst_ratio, rec.bound_ratio);
  }
  return {ok, fmt("max bound ratio %.4f, weighted mass bound holds on every record: %s", worst_ratio,
                  ok ? "yes" : "no")};
}

Outcome concentration(const SweepRun& s) {
  const SweepReport& r = s.report;
  if (!r.complete || r.records.size() != 4)
    return {false, "sweep incomplete: " + r.error};
  bool decreasing = true;
  for (std::size_t k = 1; k < r.records.size(); ++k)
    decreasing = decreasing && r.records[k].tail_mass_fraction < r.records[k - 1].tail_mass_fraction;
  const SweepRecord& last = r.records.back();
  const bool tail_ok = last.tail_mass_fraction < 0.05;
  const bool dist_ok = last.h_alpha_distance < 0.1 * r.u_tilde_h_alpha;
  const bool ok = decreasing && tail_ok && dist_ok && s.seconds < 300.0;
  std::string detail = fmt("tail mass strictly decreasing: %s, tail(1e4)=%.2e, H^a distance(1e4)=%.4f vs "
                           "0.1*||u~||=%.4f",
                           decreasing ? "yes" : "no", last.tail_mass_fraction, last.h_alpha_distance,
                           0.1 * r.u_tilde_h_alpha);
  if (!ok)
    detail += "\n" + sweep_summary(r);
  return {ok, detail};
}

Outcome validators() {
  const auto t0 = Clock::now();
  const ProblemConfig c = reference_config();
  const double cinf = c_inf_sharp(c.order);
  const SamplePlan plan = default_sample_plan(c.weight, cinf);
  const ValidationReport builtin = validate_hypotheses(c.potential, c.weight, plan);
  bool builtin_ok = true;
  for (const char* name : {"W1", "W2", "W3", "W4", "L1", "L2", "L3"})
    builtin_ok = builtin_ok && builtin.find(name) && builtin.find(name)->status == CheckStatus::pass;

  PotentialSpec quadratic = c.potential;
  quadratic.theta = 2.0;
  const ValidationReport injected = validate_hypotheses(quadratic, c.weight, plan);
  const HypothesisCheck* w1 = injected.find("W1");
  const bool w1_fails = w1 && w1->status == CheckStatus::fail && w1->witness.has_value();

  const ValidationReport flat =
      validate_hypotheses(builtin_potential(3.0, 0.0, constant_profile(1.0)), c.weight, plan);
  const HypothesisCheck* w4 = flat.find("W4");
  const bool w4_warns = w4 && w4->status == CheckStatus::warning &&
                        w4->message.find("non-strict") != std::string::npos;
  const double dt = seconds_since(t0);
  return {builtin_ok && w1_fails && w4_warns && dt < 5.0,
          fmt("builtin passes: %s, theta=2 fails W1 with witness: %s, eps=0 warns non-strict W4: %s, %.2fs",
              builtin_ok ? "yes" : "no", w1_fails ? "yes" : "no", w4_warns ? "yes" : "no", dt)};
}

Outcome determinism(const SweepRun& first) {
  const SweepRun second = run_reference_sweep();
  const bool same = first.csv == second.csv;
  return {same && !first.csv.empty(), fmt("repeat run CSV byte-identical: %s (%zu bytes)", same ? "yes" : "no",
                                          first.csv.size())};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

} // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] %2d %-34s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  report(1, "operator accuracy", guarded(operator_accuracy));
  report(2, "adjointness and spectral", guarded(adjointness_and_spectral));
  report(3, "gradient correctness", guarded(gradient_correctness));
  report(4, "fibering map", guarded(fibering_map));
  report(5, "interval ground state", guarded(bvp_ground_state));

  SweepRun sweep;
  std::string sweep_error;
  try {
    sweep = run_reference_sweep();
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  auto with_sweep = [&](auto f) {
    return [&, f] { return sweep_error.empty() ? f(sweep) : Outcome{false, "sweep failed: " + sweep_error}; };
  };
  report(6, "energy ordering", guarded(with_sweep(energy_ordering)));
  report(7, "a-priori bound", guarded(with_sweep(a_priori_bound)));
  report(8, "concentration", guarded(with_sweep(concentration)));
  report(9, "hypothesis validators", guarded(validators));
  report(10, "determinism", guarded(with_sweep(determinism)));

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
