#pragma once

#include "fracham/grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fracham {

struct Interval {
  double lo;
  double hi;
  double length() const noexcept { return hi - lo; }
  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
};

/// Bounded positive coefficient a(t) with a_min <= a(t) <= a_max.
struct Profile {
  std::function<double(double)> eval;
  double a_min;
  double a_max;
};

Profile constant_profile(double a0);
/// a(t) = a0 (1 + amplitude cos(2 pi t / period)), 0 <= amplitude < 1.
Profile cosine_profile(double a0, double amplitude, double period);

/// Nonlinearity W(t, u) with its gradient, the Ambrosetti-Rabinowitz exponent
/// theta, and a t-independent dominating function W_bar.
struct PotentialSpec {
  std::string name;
  double theta = 0.0;
  std::function<double(double, std::span<const double>)> W;
  std::function<void(double, std::span<const double>, std::span<double>)> grad_W;
  std::function<double(std::span<const double>)> W_bar;
};

/// W(t,u) = a(t) (|u|^theta + theta/(theta+eps) |u|^{theta+eps}).
/// Throws std::invalid_argument when theta <= 2 or eps < 0.
PotentialSpec builtin_potential(double theta, double epsilon, const Profile& a);

/// Homogeneous W(t,u) = a(t) |u|^theta; fibering has a closed form for it.
PotentialSpec power_potential(double theta, const Profile& a);

/// Matrix weight L(t) with scalar lower bound l(t), the constant c, the zero
/// set J of l and the interval T on which L vanishes.
struct WeightSpec {
  std::string name;
  std::size_t n_components = 1;
  std::function<Eigen::MatrixXd(double)> L;
  std::function<double(double)> l;
  double c = 0.0;
  Interval J{0.0, 0.0};
  Interval T{0.0, 0.0};
  /// Closed-form meas{l < c} when the family provides one.
  std::optional<double> sublevel_measure;
};

/// Quadrature weight of node i for trapz-like sums of (L u, v) on `grid`:
/// h/2 L(t_i - h/2) + h/2 L(t_i + h/2), dropping the half-cell that falls
/// outside the grid. Evaluating L at half-nodes lets the weight act on a node
/// sitting exactly at an end of its zero set.
Eigen::MatrixXd lumped_weight(const WeightSpec& weight, const Grid1D& grid, std::size_t i);
double lumped_scalar_weight(const WeightSpec& weight, const Grid1D& grid, std::size_t i);

/// Monotone C^1 ramp s(x) = sin^2(pi x / 2) on [0,1], s = 1 beyond.
double ramp_profile(double x);
double ramp_profile_inverse(double y);

/// L(t) = l(t) Id_n with l = 0 on the closure of J and
/// l(t) = l_max s(dist(t, J) / ramp) outside. When c_inf is positive the
/// configuration is rejected (ConfigError) unless meas{l<c} < 1/c_inf^2.
WeightSpec builtin_weight(std::size_t n, double c, double l_max, Interval J, double ramp, Interval T,
                          double c_inf = 0.0);

/// meas{l < c} by grid counting: h times the number of nodes with l(t_i) < c.
double sublevel_measure_on_grid(const WeightSpec& weight, double a, double b, std::size_t n_nodes);

enum class CheckStatus { pass, warning, fail };

struct Witness {
  double t = 0.0;
  std::vector<double> u;
  double violation = 0.0;
};

struct HypothesisCheck {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string message;
  std::optional<Witness> witness;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  bool all_pass() const;      // no failures (warnings allowed)
  bool has_warnings() const;
  const HypothesisCheck* find(const std::string& name) const;
};

/// Sample lattices used by validate_hypotheses.
struct SamplePlan {
  std::vector<double> t_samples;
  std::vector<std::vector<double>> directions;  // unit vectors q
  std::vector<double> magnitudes;               // |u| lattice for W1, W3
  std::vector<double> small_magnitudes;         // decreasing, for W2
  std::vector<double> s_grid;                   // geometric, for W4
  double c_inf = 0.0;                           // embedding constant bound
  double sublevel_a = -50.0;                    // window for grid counting
  double sublevel_b = 50.0;
  std::size_t sublevel_nodes = 100001;
  double w2_tolerance = 1e-2;
};

SamplePlan default_sample_plan(const WeightSpec& weight, double c_inf, unsigned seed = 7);

ValidationReport validate_hypotheses(const PotentialSpec& pot, const WeightSpec& weight,
                                     const SamplePlan& plan);

std::string to_string(CheckStatus s);

} // namespace fracham
