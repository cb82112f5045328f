#include "fracham/concentration.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fracham;

namespace {

ProblemConfig small_config() {
  ProblemConfig c = reference_config();
  c.truncation_R = 4.0;
  c.grid = Grid1D(-4.0, 4.0, 513);
  c.multistart = 3;
  c.c_inf_samples = 20;
  return c;
}

} // namespace

TEST_CASE("bump lives inside T") {
  const Grid1D g(-2.0, 2.0, 401);
  const Interval T{0.0, 1.0};
  const GridFunction b = bump_in(g, T, 2);
  CHECK(tail_mass_fraction(b, T) == 0.0);
  CHECK(b.max_magnitude() == doctest::Approx(std::sqrt(2.0)));
  CHECK(b(g.aligned_index(0.0), 0) == 0.0);
  CHECK(b(g.aligned_index(1.0), 1) == 0.0);
}

TEST_CASE("bump energy bound is independent of lambda") {
  const ProblemConfig c = small_config();
  const GridFunction phi = bump_in(c.grid, c.weight.T, 1);
  const double a = bump_energy_bound(line_problem(c, 10.0), phi, c.weight.T);
  const double b = bump_energy_bound(line_problem(c, 1e4), phi, c.weight.T);
  CHECK(a > 0.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("bump energy bound for a pure power") {
  ProblemConfig c = small_config();
  const double theta = 4.0;
  c.potential = power_potential(theta, constant_profile(1.0));
  const DiscreteProblem p = line_problem(c, 100.0);
  const GridFunction phi = bump_in(c.grid, c.weight.T, 1);
  const Eigen::VectorXd x = p.restrict(phi);
  const double expected = oracle::power_fibering_value(p.norm_sq(x), p.potential_integral(x), theta);
  CHECK(bump_energy_bound(p, phi, c.weight.T) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("bump leaking out of T is rejected") {
  const ProblemConfig c = small_config();
  const GridFunction phi = bump_in(c.grid, {-0.5, 1.0}, 1);
  CHECK_THROWS_AS(bump_energy_bound(line_problem(c, 10.0), phi, c.weight.T), std::invalid_argument);
}

TEST_CASE("tail mass fraction") {
  const Grid1D g(-1.0, 2.0, 4);  // nodes -1, 0, 1, 2
  GridFunction u(g, 1);
  u(0, 0) = 1.0;
  u(1, 0) = 1.0;
  u(2, 0) = 1.0;
  u(3, 0) = 1.0;
  CHECK(tail_mass_fraction(u, {0.0, 1.0}) == doctest::Approx(0.5));
  CHECK(tail_mass_fraction(GridFunction(g, 1), {0.0, 1.0}) == 0.0);
}

TEST_CASE("zero extension places values at matching nodes") {
  const Grid1D small(0.0, 1.0, 5);
  const Grid1D big(-1.0, 2.0, 13);
  const GridFunction u = GridFunction::sample(small, [](double t) { return t * (1 - t); });
  const GridFunction v = zero_extend(u, big);
  for (std::size_t i = 0; i < big.n_nodes(); ++i) {
    const double t = big.t(i);
    const double expected = (t >= 0.0 && t <= 1.0) ? t * (1 - t) : 0.0;
    CHECK(v(i, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS(zero_extend(u, Grid1D(-1.0, 2.0, 14)));
}

TEST_CASE("short sweep satisfies the ordering and mass bounds") {
  ProblemConfig c = small_config();
  const SweepReport rep = run_sweep({10.0, 100.0, 1000.0}, c);
  REQUIRE(rep.complete);
  REQUIRE(rep.records.size() == 3);
  CHECK(rep.c_tilde > 0.0);
  CHECK(rep.c_tilde <= rep.bump_bound);
  const SweepFlags& f = rep.flags;
  CHECK(f.c_lambda_nondecreasing);
  CHECK(f.c_lambda_below_c_tilde);
  CHECK(f.c_lambda_below_bump_bound);
  CHECK(f.energy_above_rho);
  CHECK(f.bound_ratio_ok);
  CHECK(f.weighted_mass_ok);
  CHECK(f.tail_mass_decreasing);
  for (const auto& v : rep.violations)
    MESSAGE(v);
  for (const auto& r : rep.records) {
    CHECK(r.gradient_norm <= 1e-7);
    CHECK(r.weighted_mass <= r.weighted_mass_bound * (1 + 1e-9));
    CHECK(r.bound_ratio <= 1.0);
  }

  std::ostringstream csv;
  write_sweep_csv(csv, rep, "run: test");
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# run: test");
  std::getline(in, line);
  CHECK(line == kSweepCsvHeader);
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#')
      ++rows;
  CHECK(rows == 3);
  CHECK(sweep_summary(rep).find("c_tilde") != std::string::npos);

  // a rerun with the same seed writes the same bytes
  std::ostringstream again;
  write_sweep_csv(again, run_sweep({10.0, 100.0, 1000.0}, c), "run: test");
  CHECK(again.str() == csv.str());
}

TEST_CASE("sweep without warm start matches cold solves") {
  ProblemConfig c = small_config();
  c.threads = 2;
  const SweepReport rep = run_sweep({30.0, 300.0}, c, {.warm_start = false});
  REQUIRE(rep.complete);
  for (const auto& r : rep.records)
    CHECK(r.starts == c.multistart);
  const GroundState gs = solve_line(c, {.lambda = 300.0});
  CHECK(rep.records[1].c_lambda == doctest::Approx(gs.energy).epsilon(1e-9));
}

TEST_CASE("profile writer emits one line per node") {
  const Grid1D g(0.0, 1.0, 5);
  GridFunction u(g, 2);
  std::ostringstream os;
  write_profile(os, u, "line one\nline two");
  const std::string s = os.str();
  CHECK(s.rfind("# line one\n# line two\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : s)
    lines += ch == '\n';
  CHECK(lines >= 7);
}
