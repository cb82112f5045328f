#include "fracham/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fracham {
namespace {

double trapezoid_weight(const Grid1D& g, std::size_t i) {
  return (i == 0 || i + 1 == g.n_nodes()) ? 0.5 * g.h() : g.h();
}

double sum_abs_pow(const GridFunction& u, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.n_nodes(); ++i)
    s += trapezoid_weight(u.grid(), i) * std::pow(u.magnitude(i), p);
  return s;
}

double weighted_pairing(const GridFunction& u, const GridFunction& v, const WeightSpec& weight) {
  if (weight.n_components != u.n_components())
    throw std::invalid_argument("weight: component count mismatch");
  const auto n = static_cast<Eigen::Index>(u.n_components());
  double s = 0.0;
  for (std::size_t i = 0; i < u.n_nodes(); ++i) {
    const Eigen::Map<const Eigen::VectorXd> ui(u.node(i).data(), n);
    const Eigen::Map<const Eigen::VectorXd> vi(v.node(i).data(), n);
    if (ui.isZero(0.0) || vi.isZero(0.0))
      continue;
    s += ui.dot(lumped_weight(weight, u.grid(), i) * vi);
  }
  return s;
}

} // namespace

double l2_norm(const GridFunction& u) { return std::sqrt(sum_abs_pow(u, 2.0)); }

double lp_norm(const GridFunction& u, double p) {
  if (std::isinf(p))
    return linf_norm(u);
  if (!(p >= 1.0))
    throw std::invalid_argument("lp_norm: p must be >= 1");
  return std::pow(sum_abs_pow(u, p), 1.0 / p);
}

double linf_norm(const GridFunction& u) { return u.max_magnitude(); }

double h_alpha_norm(const GridFunction& u, FracOrder order) {
  const double l2 = l2_norm(u);
  const double semi = fourier_seminorm(u, order);
  return std::sqrt(l2 * l2 + semi * semi);
}

double x_alpha_lambda_inner(const GridFunction& u, const GridFunction& v, FracOrder order,
                            double lambda, const WeightSpec& weight) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("x_alpha_lambda_inner: lambda must be positive");
  if (!(u.grid() == v.grid()) || u.n_components() != v.n_components())
    throw std::invalid_argument("x_alpha_lambda_inner: grid mismatch");
  const StiffnessForm a(order, u.grid());
  return a.bilinear(u, v) + lambda * weighted_pairing(u, v, weight);
}

double x_alpha_lambda_norm(const GridFunction& u, FracOrder order, double lambda,
                           const WeightSpec& weight) {
  return std::sqrt(std::max(0.0, x_alpha_lambda_inner(u, u, order, lambda, weight)));
}

double c_inf_sharp(FracOrder order) {
  const double a = order.alpha();
  if (!(a > 0.5))
    throw std::invalid_argument("c_inf_sharp: embedding needs alpha > 1/2");
  return std::sqrt(1.0 / (2.0 * a * std::sin(std::numbers::pi / (2.0 * a))));
}

double embedding_ratio(const GridFunction& u, FracOrder order) {
  const double nrm = h_alpha_norm(u, order);
  if (nrm == 0.0)
    throw std::invalid_argument("embedding_ratio: zero function");
  return linf_norm(u) / nrm;
}

EmbeddingEstimate estimate_c_inf(FracOrder order, std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 1)
    throw std::invalid_argument("estimate_c_inf: sample_count must be >= 1");
  const Grid1D grid(-10.0, 10.0, 4097);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> centre(-2.0, 2.0);
  std::uniform_real_distribution<double> log_width(std::log(0.05), std::log(0.5));
  EmbeddingEstimate est;
  for (std::size_t s = 0; s < sample_count; ++s) {
    double a[3], c[3], w[3];
    for (int j = 0; j < 3; ++j) {
      a[j] = amp(rng);
      c[j] = centre(rng);
      w[j] = std::exp(log_width(rng));
    }
    const GridFunction u = GridFunction::sample(grid, [&](double t) {
      double v = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double z = (t - c[j]) / w[j];
        v += a[j] * std::exp(-z * z);
      }
      return v;
    });
    est.c_inf_lower = std::max(est.c_inf_lower, embedding_ratio(u, order));
  }
  est.c_inf_sharp = c_inf_sharp(order);
  est.c_inf = std::max(est.c_inf_lower, est.c_inf_sharp);
  return est;
}

EmbeddingEstimate complete_embedding(EmbeddingEstimate e, const WeightSpec& weight, double meas,
                                     std::optional<double> c_inf_override) {
  if (!(meas > 0.0))
    throw std::invalid_argument("complete_embedding: meas{l<c} must be positive");
  e.c_inf = c_inf_override.value_or(std::max(e.c_inf_lower, e.c_inf_sharp));
  if (!(e.c_inf > 0.0))
    throw std::invalid_argument("complete_embedding: C_inf must be positive");
  e.meas_sublevel = meas;
  const double cm = e.c_inf * e.c_inf * meas;
  e.admissible = cm < 1.0;
  e.theta_const = (1.0 - cm) / cm;
  e.lambda_threshold = 1.0 / (weight.c * cm);
  return e;
}

bool CoercivityReport::all_hold() const {
  return applicable && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

CoercivityReport check_coercivity_bounds(const GridFunction& u, FracOrder order, double lambda,
                                           const WeightSpec& weight, const EmbeddingEstimate& est,
                                           const std::vector<double>& exponents) {
  CoercivityReport r;
  if (!est.admissible || !(lambda >= est.lambda_threshold)) {
    r.applicable = false;
    r.note = "not applicable: lambda below threshold or C_inf^2 meas{l<c} >= 1";
    return r;
  }
  r.applicable = true;
  const double theta = est.theta_const;
  const double meas = est.meas_sublevel;
  const double x2 = x_alpha_lambda_inner(u, u, order, lambda, weight);
  const double x = std::sqrt(std::max(0.0, x2));
  auto add = [&](std::string name, double lhs, double rhs) {
    r.checks.push_back({std::move(name), lhs, rhs, lhs <= rhs * (1.0 + 1e-12) + 1e-300});
  };
  for (double p : exponents) {
    if (std::isinf(p)) {
      add("Linf", linf_norm(u), x / std::sqrt(meas * theta));
    } else if (p == 2.0) {
      const double l2 = l2_norm(u);
      add("L2", l2 * l2, x2 / theta);
      const double ha = h_alpha_norm(u, order);
      add("H_alpha", ha * ha, (1.0 + 1.0 / theta) * x2);
    } else {
      const double lhs = std::pow(lp_norm(u, p), p);
      const double rhs = std::pow(x, p) / (std::pow(theta, p / 2.0) * std::pow(meas, (p - 2.0) / 2.0));
      add("L" + std::to_string(static_cast<int>(p)), lhs, rhs);
    }
  }
  return r;
}

bool NormReport::interpolation_holds() const {
  for (const auto& [p, v] : lp) {
    const double lhs = std::pow(v, p);
    const double rhs = std::pow(linf, p - 2.0) * l2 * l2;
    if (lhs > rhs * (1.0 + 1e-12) + 1e-300)
      return false;
  }
  return true;
}

NormReport norm_report(const GridFunction& u, FracOrder order, double lambda, const WeightSpec& weight,
                       const std::vector<double>& exponents) {
  NormReport r;
  r.l2 = l2_norm(u);
  r.linf = linf_norm(u);
  for (double p : exponents)
    if (std::isfinite(p))
      r.lp[p] = lp_norm(u, p);
  r.h_alpha = h_alpha_norm(u, order);
  r.x_alpha_lambda = x_alpha_lambda_norm(u, order, lambda, weight);
  return r;
}

IntervalBounds check_interval_inequalities(const GridFunction& u, FracOrder order, double p) {
  const double a = order.alpha();
  if (!(p > 1.0) || !(a > 1.0 / p))
    throw std::invalid_argument("check_interval_inequalities: need p > 1 and alpha > 1/p");
  const double len = u.grid().b() - u.grid().a();
  const GridFunction du = left_frac_derivative(u, order);
  const double q = p / (p - 1.0);
  IntervalBounds b;
  b.p = p;
  b.lp = lp_norm(u, p);
  b.deriv_lp = lp_norm(du, p);
  b.lp_bound = std::pow(len, a) / std::tgamma(a + 1.0) * b.deriv_lp;
  b.linf = linf_norm(u);
  b.linf_bound = std::pow(len, a - 1.0 / p) / (std::tgamma(a) * std::pow((a - 1.0) * q + 1.0, 1.0 / q)) *
                 b.deriv_lp;
  b.lp_holds = b.lp <= b.lp_bound;
  b.linf_holds = b.linf <= b.linf_bound;
  return b;
}

} // namespace fracham
