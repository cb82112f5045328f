#include "fracham/potentials.hpp"

#include "fracham/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fracham {
namespace {

double norm2(std::span<const double> u) {
  double s = 0.0;
  for (double x : u)
    s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

} // namespace

Profile constant_profile(double a0) {
  if (!(a0 > 0.0))
    throw std::invalid_argument("constant_profile: a0 must be positive");
  return {[a0](double) { return a0; }, a0, a0};
}

Profile cosine_profile(double a0, double amplitude, double period) {
  if (!(a0 > 0.0) || !(amplitude >= 0.0 && amplitude < 1.0) || !(period > 0.0))
    throw std::invalid_argument("cosine_profile: need a0 > 0, 0 <= amplitude < 1, period > 0");
  return {[=](double t) { return a0 * (1.0 + amplitude * std::cos(2.0 * std::numbers::pi * t / period)); },
          a0 * (1.0 - amplitude), a0 * (1.0 + amplitude)};
}

PotentialSpec builtin_potential(double theta, double epsilon, const Profile& a) {
  if (!(theta > 2.0))
    throw std::invalid_argument("builtin_potential: theta must exceed 2");
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("builtin_potential: epsilon must be nonnegative");
  if (!(a.a_min > 0.0 && a.a_min <= a.a_max))
    throw std::invalid_argument("builtin_potential: need 0 < a_min <= a_max");
  const double coef = theta / (theta + epsilon);
  const auto a_eval = a.eval;
  const double a_max = a.a_max;

  PotentialSpec p;
  std::ostringstream name;
  name << "two_power(theta=" << theta << ",epsilon=" << epsilon << ")";
  p.name = name.str();
  p.theta = theta;
  p.W = [=](double t, std::span<const double> u) {
    const double r = norm2(u);
    if (r == 0.0)
      return 0.0;
    const double rt = std::pow(r, theta);
    return a_eval(t) * (rt + coef * rt * std::pow(r, epsilon));
  };
  p.grad_W = [=](double t, std::span<const double> u, std::span<double> g) {
    const double r = norm2(u);
    if (r == 0.0) {
      std::fill(g.begin(), g.end(), 0.0);
      return;
    }
    const double base = std::pow(r, theta - 2.0);
    const double f = a_eval(t) * theta * base * (1.0 + std::pow(r, epsilon));
    for (std::size_t i = 0; i < u.size(); ++i)
      g[i] = f * u[i];
  };
  p.W_bar = [=](std::span<const double> u) {
    const double r = norm2(u);
    if (r == 0.0)
      return 0.0;
    const double value = std::pow(r, theta) + coef * std::pow(r, theta + epsilon);
    const double grad = theta * std::pow(r, theta - 1.0) + theta * std::pow(r, theta + epsilon - 1.0);
    return a_max * (value + grad);
  };
  return p;
}

PotentialSpec power_potential(double theta, const Profile& a) {
  if (!(theta > 2.0))
    throw std::invalid_argument("power_potential: theta must exceed 2");
  const auto a_eval = a.eval;
  const double a_max = a.a_max;
  PotentialSpec p;
  p.name = "power(theta=" + std::to_string(theta) + ")";
  p.theta = theta;
  p.W = [=](double t, std::span<const double> u) {
    const double r = norm2(u);
    return r == 0.0 ? 0.0 : a_eval(t) * std::pow(r, theta);
  };
  p.grad_W = [=](double t, std::span<const double> u, std::span<double> g) {
    const double r = norm2(u);
    const double f = r == 0.0 ? 0.0 : a_eval(t) * theta * std::pow(r, theta - 2.0);
    for (std::size_t i = 0; i < u.size(); ++i)
      g[i] = f * u[i];
  };
  p.W_bar = [=](std::span<const double> u) {
    const double r = norm2(u);
    return r == 0.0 ? 0.0 : a_max * (std::pow(r, theta) + theta * std::pow(r, theta - 1.0));
  };
  return p;
}

Eigen::MatrixXd lumped_weight(const WeightSpec& weight, const Grid1D& grid, std::size_t i) {
  const double h = grid.h();
  const double t = grid.t(i);
  const auto n = static_cast<Eigen::Index>(weight.n_components);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (i > 0)
    m += 0.5 * h * weight.L(t - 0.5 * h);
  if (i + 1 < grid.n_nodes())
    m += 0.5 * h * weight.L(t + 0.5 * h);
  return m;
}

double lumped_scalar_weight(const WeightSpec& weight, const Grid1D& grid, std::size_t i) {
  const double h = grid.h();
  const double t = grid.t(i);
  double m = 0.0;
  if (i > 0)
    m += 0.5 * h * weight.l(t - 0.5 * h);
  if (i + 1 < grid.n_nodes())
    m += 0.5 * h * weight.l(t + 0.5 * h);
  return m;
}

double ramp_profile(double x) {
  if (x <= 0.0)
    return 0.0;
  if (x >= 1.0)
    return 1.0;
  const double s = std::sin(0.5 * std::numbers::pi * x);
  return s * s;
}

double ramp_profile_inverse(double y) {
  if (!(y >= 0.0 && y <= 1.0))
    throw std::invalid_argument("ramp_profile_inverse: y must lie in [0, 1]");
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(y));
}

WeightSpec builtin_weight(std::size_t n, double c, double l_max, Interval J, double ramp, Interval T,
                          double c_inf) {
  if (n == 0)
    throw std::invalid_argument("builtin_weight: n must be positive");
  if (!(c > 0.0 && l_max > c))
    throw std::invalid_argument("builtin_weight: need l_max > c > 0");
  if (!(ramp > 0.0))
    throw std::invalid_argument("builtin_weight: ramp must be positive");
  if (!(J.lo < J.hi) || !(T.lo < T.hi))
    throw std::invalid_argument("builtin_weight: J and T must be nonempty intervals");
  if (T.lo < J.lo || T.hi > J.hi)
    throw std::invalid_argument("builtin_weight: T must lie inside J");

  WeightSpec w;
  std::ostringstream name;
  name << "ramp(c=" << c << ",l_max=" << l_max << ",J=(" << J.lo << "," << J.hi << "),ramp=" << ramp
       << ")";
  w.name = name.str();
  w.n_components = n;
  w.c = c;
  w.J = J;
  w.T = T;
  w.l = [=](double t) {
    const double dist = t < J.lo ? J.lo - t : (t > J.hi ? t - J.hi : 0.0);
    return l_max * ramp_profile(dist / ramp);
  };
  const auto l = w.l;
  w.L = [=](double t) -> Eigen::MatrixXd {
    return l(t) * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  };
  w.sublevel_measure = J.length() + 2.0 * ramp * ramp_profile_inverse(c / l_max);
  if (c_inf > 0.0 && !(*w.sublevel_measure < 1.0 / (c_inf * c_inf))) {
    std::ostringstream msg;
    msg << "builtin_weight: meas{l<c} = " << *w.sublevel_measure << " is not below 1/C_inf^2 = "
        << 1.0 / (c_inf * c_inf);
    throw ConfigError(msg.str());
  }
  return w;
}

double sublevel_measure_on_grid(const WeightSpec& weight, double a, double b, std::size_t n_nodes) {
  if (!(a < b) || n_nodes < 3)
    throw std::invalid_argument("sublevel_measure_on_grid: bad window");
  const double h = (b - a) / static_cast<double>(n_nodes - 1);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_nodes; ++i)
    if (weight.l(a + static_cast<double>(i) * h) < weight.c)
      ++count;
  return h * static_cast<double>(count);
}

bool ValidationReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const HypothesisCheck& c) { return c.status == CheckStatus::fail; });
}

bool ValidationReport::has_warnings() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const HypothesisCheck& c) { return c.status == CheckStatus::warning; });
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

std::string to_string(CheckStatus s) {
  switch (s) {
  case CheckStatus::pass:
    return "pass";
  case CheckStatus::warning:
    return "warning";
  case CheckStatus::fail:
    return "fail";
  }
  return "unknown";
}

SamplePlan default_sample_plan(const WeightSpec& weight, double c_inf, unsigned seed) {
  SamplePlan plan;
  const double lo = std::min(weight.J.lo, weight.T.lo) - 3.0;
  const double hi = std::max(weight.J.hi, weight.T.hi) + 3.0;
  constexpr int n_t = 121;
  for (int i = 0; i < n_t; ++i)
    plan.t_samples.push_back(lo + (hi - lo) * i / (n_t - 1));
  for (double t : {weight.J.lo, weight.J.hi, weight.T.lo, weight.T.hi})
    plan.t_samples.push_back(t);
  for (int i = 1; i < 20; ++i)
    plan.t_samples.push_back(weight.T.lo + weight.T.length() * i / 20.0);
  std::sort(plan.t_samples.begin(), plan.t_samples.end());

  const std::size_t n = weight.n_components;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    plan.directions.push_back(e);
    e[k] = -1.0;
    plan.directions.push_back(e);
  }
  if (n > 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int r = 0; r < 8; ++r) {
      std::vector<double> q(n);
      for (double& x : q)
        x = g(rng);
      const double s = norm2(q);
      for (double& x : q)
        x /= s;
      plan.directions.push_back(q);
    }
  }
  for (int e = -12; e <= 12; ++e)
    plan.magnitudes.push_back(std::pow(10.0, e / 4.0));
  for (int e = 1; e <= 6; ++e)
    plan.small_magnitudes.push_back(std::pow(10.0, -e));
  for (int e = -12; e <= 12; ++e)
    plan.s_grid.push_back(std::pow(10.0, e / 4.0));
  plan.c_inf = c_inf;
  plan.sublevel_a = lo - 20.0;
  plan.sublevel_b = hi + 20.0;
  return plan;
}

namespace {

void record_worst(std::optional<Witness>& worst, double t, std::span<const double> u, double violation) {
  if (!worst || violation > worst->violation)
    worst = Witness{t, std::vector<double>(u.begin(), u.end()), violation};
}

HypothesisCheck check_zero_at_origin(const PotentialSpec& pot, const SamplePlan& plan, std::size_t n) {
  HypothesisCheck chk{"W(t,0)=0", CheckStatus::pass, "W vanishes at u = 0", std::nullopt};
  const std::vector<double> zero(n, 0.0);
  std::optional<Witness> worst;
  for (double t : plan.t_samples) {
    const double v = std::abs(pot.W(t, zero));
    if (v > 1e-14)
      record_worst(worst, t, zero, v);
  }
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message = "W(t,0) != 0";
    chk.witness = worst;
  }
  return chk;
}

HypothesisCheck check_w1(const PotentialSpec& pot, const SamplePlan& plan, std::size_t n) {
  HypothesisCheck chk{"W1", CheckStatus::pass, "0 < theta W(t,u) <= (grad W(t,u), u)", std::nullopt};
  std::vector<double> u(n), g(n);
  std::optional<Witness> pointwise;
  std::optional<Witness> min_ratio;  // argmin of (grad W, u) / W, violation = 2 - ratio
  for (double t : plan.t_samples)
    for (const auto& q : plan.directions)
      for (double r : plan.magnitudes) {
        for (std::size_t i = 0; i < n; ++i)
          u[i] = r * q[i];
        const double w = pot.W(t, u);
        pot.grad_W(t, u, g);
        const double gu = dot(g, u);
        const double scale = std::max({1e-300, std::abs(w), std::abs(gu)});
        double violation = (pot.theta * w - gu) / scale;
        if (w <= 0.0)
          violation = std::max(violation, 1.0);
        if (violation > 1e-12)
          record_worst(pointwise, t, u, violation);
        if (w > 0.0) {
          const double ratio_violation = 2.0 - gu / w;
          record_worst(min_ratio, t, u, ratio_violation);
        }
      }
  if (!(pot.theta > 2.0)) {
    chk.status = CheckStatus::fail;
    std::ostringstream msg;
    msg << "declared theta = " << pot.theta << " is not > 2";
    chk.message = msg.str();
    Witness w = min_ratio.value_or(Witness{plan.t_samples.front(), std::vector<double>(n, 0.0), 0.0});
    w.violation = std::max(w.violation, 2.0 - pot.theta);
    chk.witness = w;
  } else if (pointwise) {
    chk.status = CheckStatus::fail;
    chk.message = "theta W(t,u) > (grad W(t,u), u) or W <= 0 at a sample";
    chk.witness = pointwise;
  }
  return chk;
}

HypothesisCheck check_w2(const PotentialSpec& pot, const SamplePlan& plan, std::size_t n) {
  HypothesisCheck chk{"W2", CheckStatus::pass, "|grad W(t,u)| = o(|u|) as u -> 0", std::nullopt};
  std::vector<double> u(n), g(n);
  std::optional<Witness> worst;
  bool monotone = true;
  for (double t : plan.t_samples)
    for (const auto& q : plan.directions) {
      double prev = std::numeric_limits<double>::infinity();
      double last = 0.0;
      for (double r : plan.small_magnitudes) {
        for (std::size_t i = 0; i < n; ++i)
          u[i] = r * q[i];
        pot.grad_W(t, u, g);
        last = norm2(g) / r;
        if (last > prev * (1.0 + 1e-12))
          monotone = false;
        prev = last;
      }
      if (last > plan.w2_tolerance)
        record_worst(worst, t, u, last);
    }
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message = "|grad W|/|u| does not tend to 0 at the smallest sampled |u|";
    chk.witness = worst;
  } else if (!monotone) {
    chk.status = CheckStatus::warning;
    chk.message = "|grad W|/|u| small but not monotone along shrinking |u|";
  }
  return chk;
}

HypothesisCheck check_w3(const PotentialSpec& pot, const SamplePlan& plan, std::size_t n) {
  HypothesisCheck chk{"W3", CheckStatus::pass, "|W| + |grad W| <= |W_bar(u)|", std::nullopt};
  if (!pot.W_bar) {
    chk.status = CheckStatus::fail;
    chk.message = "no dominating W_bar supplied";
    return chk;
  }
  std::vector<double> u(n), g(n);
  std::optional<Witness> worst;
  for (double t : plan.t_samples)
    for (const auto& q : plan.directions)
      for (double r : plan.magnitudes) {
        for (std::size_t i = 0; i < n; ++i)
          u[i] = r * q[i];
        pot.grad_W(t, u, g);
        const double lhs = std::abs(pot.W(t, u)) + norm2(g);
        const double rhs = std::abs(pot.W_bar(u));
        const double violation = (lhs - rhs) / std::max(1e-300, rhs);
        if (violation > 1e-12)
          record_worst(worst, t, u, violation);
      }
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message = "W_bar does not dominate at a sample";
    chk.witness = worst;
  }
  return chk;
}

HypothesisCheck check_w4(const PotentialSpec& pot, const SamplePlan& plan, std::size_t n) {
  HypothesisCheck chk{"W4", CheckStatus::pass,
                      "s -> (grad W(t,sq), q)/s^(theta-1) strictly increasing", std::nullopt};
  std::vector<double> u(n), g(n);
  std::optional<Witness> worst;
  bool strict = true;
  for (double t : plan.t_samples)
    for (const auto& q : plan.directions) {
      double prev = 0.0;
      bool first = true;
      for (double s : plan.s_grid) {
        for (std::size_t i = 0; i < n; ++i)
          u[i] = s * q[i];
        pot.grad_W(t, u, g);
        const double f = dot(g, q) / std::pow(s, pot.theta - 1.0);
        if (!first) {
          const double scale = std::max(std::abs(f), std::abs(prev));
          const double diff = f - prev;
          if (diff < -1e-10 * scale)
            record_worst(worst, t, u, -diff / std::max(1e-300, scale));
          else if (diff <= 1e-10 * scale)
            strict = false;
        }
        prev = f;
        first = false;
      }
    }
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message = "ray quotient decreases";
    chk.witness = worst;
  } else if (!strict) {
    chk.status = CheckStatus::warning;
    chk.message = "non-strict: ray quotient constant on part of the s-grid";
  }
  return chk;
}

HypothesisCheck check_gradient(const PotentialSpec& pot, const SamplePlan& plan, std::size_t n) {
  HypothesisCheck chk{"gradW", CheckStatus::pass, "grad W matches central differences of W",
                      std::nullopt};
  std::vector<double> u(n), g(n), up(n), um(n);
  std::optional<Witness> worst;
  for (double t : plan.t_samples)
    for (const auto& q : plan.directions)
      for (double r : plan.magnitudes) {
        for (std::size_t i = 0; i < n; ++i)
          u[i] = r * q[i];
        pot.grad_W(t, u, g);
        const double step = 1e-5 * r;
        double err = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          up = u;
          um = u;
          up[k] += step;
          um[k] -= step;
          const double fd = (pot.W(t, up) - pot.W(t, um)) / (2.0 * step);
          err = std::max(err, std::abs(fd - g[k]));
        }
        const double rel = err / std::max(1e-300, norm2(g));
        if (rel > 1e-5)
          record_worst(worst, t, u, rel);
      }
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message = "grad W inconsistent with W";
    chk.witness = worst;
  }
  return chk;
}

HypothesisCheck check_l1(const WeightSpec& w, const SamplePlan& plan) {
  HypothesisCheck chk{"L1", CheckStatus::pass, "(L(t)u,u) >= l(t)|u|^2, l >= 0, meas{l<c} < 1/C_inf^2",
                      std::nullopt};
  std::optional<Witness> worst;
  bool sublevel_nonempty = false;
  for (double t : plan.t_samples) {
    const Eigen::MatrixXd L = w.L(t);
    const double lt = w.l(t);
    if (lt < w.c)
      sublevel_nonempty = true;
    const double asym = (L - L.transpose()).cwiseAbs().maxCoeff();
    const double scale = 1.0 + L.cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
      record_worst(worst, t, {}, asym);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double lam_min = es.eigenvalues().minCoeff();
    if (lam_min < lt - 1e-12 * scale)
      record_worst(worst, t, {}, lt - lam_min);
    if (lt < 0.0)
      record_worst(worst, t, {}, -lt);
  }
  const double counted = sublevel_measure_on_grid(w, plan.sublevel_a, plan.sublevel_b, plan.sublevel_nodes);
  const double meas = w.sublevel_measure.value_or(counted);
  std::ostringstream msg;
  msg << "meas{l<c} = " << meas << " (grid count " << counted << ")";
  if (plan.c_inf > 0.0)
    msg << ", 1/C_inf^2 = " << 1.0 / (plan.c_inf * plan.c_inf);
  chk.message = msg.str();
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message += "; pointwise lower bound violated";
    chk.witness = worst;
  } else if (!sublevel_nonempty) {
    chk.status = CheckStatus::fail;
    chk.message += "; {l<c} empty on samples";
    chk.witness = Witness{plan.t_samples.front(), {}, w.c};
  } else if (plan.c_inf > 0.0 && !(meas * plan.c_inf * plan.c_inf < 1.0)) {
    chk.status = CheckStatus::fail;
    chk.message += "; sublevel set too large";
    chk.witness = Witness{0.5 * (w.J.lo + w.J.hi), {}, meas - 1.0 / (plan.c_inf * plan.c_inf)};
  } else if (plan.c_inf <= 0.0) {
    chk.status = CheckStatus::warning;
    chk.message += "; no C_inf bound supplied, measure condition unchecked";
  }
  return chk;
}

HypothesisCheck check_l2(const WeightSpec& w, const SamplePlan& plan) {
  HypothesisCheck chk{"L2", CheckStatus::pass, "J = int(l^-1(0)) nonempty finite, closure(J) = l^-1(0)",
                      std::nullopt};
  std::optional<Witness> worst;
  if (!(std::isfinite(w.J.lo) && std::isfinite(w.J.hi) && w.J.lo < w.J.hi)) {
    chk.status = CheckStatus::fail;
    chk.message = "J is empty or unbounded";
    chk.witness = Witness{w.J.lo, {}, 1.0};
    return chk;
  }
  for (double t : plan.t_samples) {
    const double lt = w.l(t);
    if (w.J.contains(t) && lt != 0.0)
      record_worst(worst, t, {}, std::abs(lt));
    if (!w.J.contains(t) && !(lt > 0.0))
      record_worst(worst, t, {}, 1.0);
  }
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message = "zero set of l differs from closure(J)";
    chk.witness = worst;
  }
  return chk;
}

HypothesisCheck check_l3(const WeightSpec& w, const SamplePlan& plan) {
  HypothesisCheck chk{"L3", CheckStatus::pass, "T inside J and L(t) = 0 on closure(T)", std::nullopt};
  if (w.T.lo < w.J.lo || w.T.hi > w.J.hi || !(w.T.lo < w.T.hi)) {
    chk.status = CheckStatus::fail;
    chk.message = "T is not a nonempty subinterval of J";
    chk.witness = Witness{w.T.lo, {}, std::max(w.J.lo - w.T.lo, w.T.hi - w.J.hi)};
    return chk;
  }
  std::optional<Witness> worst;
  for (double t : plan.t_samples) {
    if (!w.T.contains(t))
      continue;
    const double m = w.L(t).cwiseAbs().maxCoeff();
    if (m != 0.0)
      record_worst(worst, t, {}, m);
  }
  if (worst) {
    chk.status = CheckStatus::fail;
    chk.message = "L(t) nonzero on T";
    chk.witness = worst;
  }
  return chk;
}

} // namespace

ValidationReport validate_hypotheses(const PotentialSpec& pot, const WeightSpec& weight,
                                     const SamplePlan& plan) {
  const std::size_t n = weight.n_components;
  ValidationReport r;
  r.checks.push_back(check_zero_at_origin(pot, plan, n));
  r.checks.push_back(check_w1(pot, plan, n));
  r.checks.push_back(check_w2(pot, plan, n));
  r.checks.push_back(check_w3(pot, plan, n));
  r.checks.push_back(check_w4(pot, plan, n));
  r.checks.push_back(check_gradient(pot, plan, n));
  r.checks.push_back(check_l1(weight, plan));
  r.checks.push_back(check_l2(weight, plan));
  r.checks.push_back(check_l3(weight, plan));
  return r;
}

} // namespace fracham
