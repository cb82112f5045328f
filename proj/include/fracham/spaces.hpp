#pragma once

#include "fracham/fracops.hpp"
#include "fracham/grid.hpp"
#include "fracham/potentials.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fracham {

inline constexpr double kInfinityExponent = std::numeric_limits<double>::infinity();

// Trapezoidal norms of |u(t)| over the grid.
double l2_norm(const GridFunction& u);
double lp_norm(const GridFunction& u, double p);
double linf_norm(const GridFunction& u);

/// (||u||_{L2}^2 + fourier_seminorm(u)^2)^{1/2}.
double h_alpha_norm(const GridFunction& u, FracOrder order);

/// <u,v>_{X^{alpha,lambda}} = u^T A v + lambda * sum_i (M_i u_i, v_i), with
/// M_i = lumped_weight(L, grid, i) and A the stiffness form of u's grid.
double x_alpha_lambda_inner(const GridFunction& u, const GridFunction& v, FracOrder order,
                            double lambda, const WeightSpec& weight);
double x_alpha_lambda_norm(const GridFunction& u, FracOrder order, double lambda,
                           const WeightSpec& weight);

/// Best constant of sup|u| <= C ||u||_alpha for the Fourier norm:
/// C^2 = (1/2pi) int dw / (1 + |w|^{2 alpha}) = 1 / (2 alpha sin(pi / (2 alpha))).
double c_inf_sharp(FracOrder order);

/// sup|u| / ||u||_alpha for one sample.
double embedding_ratio(const GridFunction& u, FracOrder order);

struct EmbeddingEstimate {
  double c_inf_lower = 0.0;  // running max of sampled ratios
  double c_inf_sharp = 0.0;  // closed-form best constant
  double c_inf = 0.0;        // value used downstream
  double meas_sublevel = std::numeric_limits<double>::quiet_NaN();
  double theta_const = std::numeric_limits<double>::quiet_NaN();
  double lambda_threshold = std::numeric_limits<double>::quiet_NaN();
  bool admissible = false;   // C^2 meas{l<c} < 1
};

/// Sampled lower bound on C_inf from random Gaussian-sum bumps. Samples are
/// drawn from one stream, so a longer run extends a shorter one.
EmbeddingEstimate estimate_c_inf(FracOrder order, std::size_t sample_count, std::uint64_t seed);

/// Fills meas{l<c}, Theta and the lambda threshold 1/(c C^2 meas). The
/// constant used is the override when given, else max(sampled, sharp).
EmbeddingEstimate complete_embedding(EmbeddingEstimate partial, const WeightSpec& weight,
                                     double meas_sublevel,
                                     std::optional<double> c_inf_override = std::nullopt);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct CoercivityReport {
  bool applicable = false;
  std::string note;
  std::vector<InequalityCheck> checks;
  bool all_hold() const;
};

/// L2, H^alpha and L^p bounds in terms of ||u||_{X^{alpha,lambda}}, valid for
/// lambda >= est.lambda_threshold. Below the threshold the report is marked
/// not applicable and carries no checks.
CoercivityReport check_coercivity_bounds(const GridFunction& u, FracOrder order, double lambda,
                                           const WeightSpec& weight, const EmbeddingEstimate& est,
                                           const std::vector<double>& exponents = {2.0, 4.0,
                                                                                   kInfinityExponent});

struct NormReport {
  double l2 = 0.0;
  std::map<double, double> lp;
  double linf = 0.0;
  double h_alpha = 0.0;
  double x_alpha_lambda = 0.0;
  /// ||u||_p^p <= ||u||_inf^{p-2} ||u||_2^2 for every stored p.
  bool interpolation_holds() const;
};

NormReport norm_report(const GridFunction& u, FracOrder order, double lambda, const WeightSpec& weight,
                       const std::vector<double>& exponents = {4.0});

/// Bounds on [0, T] for u vanishing at both ends, with D the left derivative
/// from 0:  ||u||_p <= T^a/Gamma(a+1) ||D u||_p  and
/// ||u||_inf <= T^{a-1/p} / (Gamma(a) ((a-1)q+1)^{1/q}) ||D u||_p.
struct IntervalBounds {
  double p = 2.0;
  double lp = 0.0;
  double deriv_lp = 0.0;
  double lp_bound = 0.0;
  double linf = 0.0;
  double linf_bound = 0.0;
  bool lp_holds = false;
  bool linf_holds = false;
};

IntervalBounds check_interval_inequalities(const GridFunction& u, FracOrder order, double p = 2.0);

} // namespace fracham
