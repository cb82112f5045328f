#include "fracham/errors.hpp"
#include "fracham/potentials.hpp"
#include "fracham/spaces.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fracham;

namespace {

WeightSpec reference_weight(std::size_t n = 1, double l_max = 100.0) {
  return builtin_weight(n, 1.0, l_max, {0.0, 1.0}, 0.1, {0.0, 1.0});
}

} // namespace

TEST_CASE("builtin potential gradient matches central differences") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  const PotentialSpec p = builtin_potential(3.0, 1.0, cosine_profile(1.0, 0.3, 2.0));
  for (int k = 0; k < 50; ++k) {
    const double t = n(rng);
    std::vector<double> u{n(rng), n(rng), n(rng)};
    std::vector<double> g(3);
    p.grad_W(t, u, g);
    for (std::size_t i = 0; i < 3; ++i) {
      auto f = [&](double x) {
        auto v = u;
        v[i] = x;
        return p.W(t, v);
      };
      CHECK(g[i] == doctest::Approx(oracle::central_difference(f, u[i], 1e-5)).epsilon(1e-6));
    }
  }
}

TEST_CASE("power potential closed form") {
  const PotentialSpec p = power_potential(4.0, constant_profile(2.0));
  const std::vector<double> u{1.0, 2.0};
  CHECK(p.W(0.3, u) == doctest::Approx(2.0 * 25.0));
  std::vector<double> g(2);
  p.grad_W(0.3, u, g);
  CHECK(g[0] == doctest::Approx(2.0 * 4.0 * 5.0 * 1.0));
  CHECK(p.W(0.0, std::vector<double>{0.0, 0.0}) == 0.0);
}

TEST_CASE("potential constructors reject bad parameters") {
  CHECK_THROWS_AS(builtin_potential(2.0, 1.0, constant_profile(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(builtin_potential(3.0, -1.0, constant_profile(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(power_potential(1.5, constant_profile(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(constant_profile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(cosine_profile(1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("ramp profile and inverse") {
  CHECK(ramp_profile(-1.0) == 0.0);
  CHECK(ramp_profile(2.0) == 1.0);
  for (double y : {0.0, 0.01, 0.3, 0.5, 0.99, 1.0})
    CHECK(ramp_profile(ramp_profile_inverse(y)) == doctest::Approx(y).epsilon(1e-12));
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = ramp_profile(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("builtin weight vanishes on J and saturates outside") {
  const WeightSpec w = reference_weight(2);
  CHECK(w.l(0.5) == 0.0);
  CHECK(w.l(0.0) == 0.0);
  CHECK(w.l(1.0) == 0.0);
  CHECK(w.l(1.2) == doctest::Approx(100.0));
  CHECK(w.l(-0.05) == doctest::Approx(50.0));
  CHECK(w.L(1.5).isApprox(100.0 * Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("sublevel measure closed form agrees with grid count") {
  for (double l_max : {10.0, 100.0}) {
    const WeightSpec w = reference_weight(1, l_max);
    const double counted = sublevel_measure_on_grid(w, -5.0, 6.0, 1100001);
    CHECK(*w.sublevel_measure == doctest::Approx(counted).epsilon(1e-4));
    const double expected = 1.0 + 0.2 * 2.0 / std::numbers::pi * std::asin(std::sqrt(1.0 / l_max));
    CHECK(*w.sublevel_measure == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("too large sublevel set is a configuration error") {
  // C_inf^2 = 1/(2a sin(pi/2a)); for a = 0.75 the bound 1/C^2 is about 1.299
  const double c = c_inf_sharp(FracOrder(0.75));
  CHECK_NOTHROW(builtin_weight(1, 1.0, 100.0, {0.0, 1.0}, 0.1, {0.0, 1.0}, c));
  CHECK_THROWS_AS(builtin_weight(1, 1.0, 100.0, {0.0, 1.5}, 0.1, {0.0, 1.0}, c), ConfigError);
}

TEST_CASE("lumped weight integrates the two half cells") {
  const WeightSpec w = reference_weight(1);
  const Grid1D g(-1.0, 2.0, 49);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const double h = g.h();
    const double t = g.t(i);
    double expected = 0.0;
    if (i > 0)
      expected += 0.5 * h * w.l(t - 0.5 * h);
    if (i + 1 < g.n_nodes())
      expected += 0.5 * h * w.l(t + 0.5 * h);
    CHECK(lumped_scalar_weight(w, g, i) == doctest::Approx(expected));
    CHECK(lumped_weight(w, g, i)(0, 0) == doctest::Approx(expected));
  }
  // nodes on the closed zero set with both half cells inside it get nothing
  CHECK(lumped_scalar_weight(w, g, g.aligned_index(0.5)) == 0.0);
  // the edge of J picks up exactly one half cell
  const std::size_t j0 = g.aligned_index(0.0);
  CHECK(lumped_scalar_weight(w, g, j0) > 0.0);
  CHECK(lumped_scalar_weight(w, g, j0) == doctest::Approx(0.5 * g.h() * w.l(-0.5 * g.h())));
}

TEST_CASE("builtin data pass every hypothesis check") {
  const double c = c_inf_sharp(FracOrder(0.75));
  for (std::size_t n : {1u, 2u}) {
    const WeightSpec w = reference_weight(n);
    const PotentialSpec p = builtin_potential(3.0, 1.0, constant_profile(1.0));
    const ValidationReport r = validate_hypotheses(p, w, default_sample_plan(w, c));
    for (const auto& chk : r.checks) {
      INFO(chk.name << ": " << chk.message);
      CHECK(chk.status == CheckStatus::pass);
    }
    CHECK(r.all_pass());
    CHECK_FALSE(r.has_warnings());
  }
}

TEST_CASE("declared theta = 2 fails the superquadratic check with a witness") {
  const WeightSpec w = reference_weight();
  PotentialSpec p = power_potential(3.0, constant_profile(1.0));
  p.theta = 2.0;
  const ValidationReport r = validate_hypotheses(p, w, default_sample_plan(w, 1.0));
  const HypothesisCheck* chk = r.find("W1");
  REQUIRE(chk != nullptr);
  CHECK(chk->status == CheckStatus::fail);
  REQUIRE(chk->witness.has_value());
  CHECK(chk->witness->violation >= 0.0);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("quadratic potential fails the small-amplitude check") {
  const WeightSpec w = reference_weight();
  PotentialSpec p;
  p.name = "quadratic";
  p.theta = 2.5;
  p.W = [](double, std::span<const double> u) { return u[0] * u[0]; };
  p.grad_W = [](double, std::span<const double> u, std::span<double> g) { g[0] = 2.0 * u[0]; };
  p.W_bar = [](std::span<const double> u) { return 10.0 * (u[0] * u[0] + std::abs(u[0])); };
  const ValidationReport r = validate_hypotheses(p, w, default_sample_plan(w, 1.0));
  CHECK(r.find("W2")->status == CheckStatus::fail);
  CHECK(r.find("W1")->status == CheckStatus::fail);
}

TEST_CASE("single power gives a non-strict monotonicity warning") {
  const WeightSpec w = reference_weight();
  const double c = c_inf_sharp(FracOrder(0.75));
  const ValidationReport r =
      validate_hypotheses(builtin_potential(3.0, 0.0, constant_profile(1.0)), w, default_sample_plan(w, c));
  CHECK(r.find("W4")->status == CheckStatus::warning);
  CHECK(r.all_pass());
  CHECK(r.has_warnings());
}

TEST_CASE("weight that does not vanish on T fails the localisation check") {
  WeightSpec w = reference_weight();
  w.T = {0.5, 1.5};
  const ValidationReport r = validate_hypotheses(builtin_potential(3.0, 1.0, constant_profile(1.0)), w,
                                                 default_sample_plan(w, 1.0));
  const HypothesisCheck* chk = r.find("L3");
  REQUIRE(chk != nullptr);
  CHECK(chk->status == CheckStatus::fail);
  CHECK(chk->witness.has_value());
  CHECK(r.find("nonexistent") == nullptr);
}

TEST_CASE("weight without a sublevel set fails the coercivity check") {
  WeightSpec w = reference_weight();
  w.c = 0.0;
  const ValidationReport r = validate_hypotheses(builtin_potential(3.0, 1.0, constant_profile(1.0)), w,
                                                 default_sample_plan(w, 1.0));
  CHECK(r.find("L1")->status == CheckStatus::fail);
}
