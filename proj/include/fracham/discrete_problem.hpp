#pragma once

#include "fracham/fracops.hpp"
#include "fracham/grid.hpp"
#include "fracham/potentials.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <optional>

namespace fracham {

/// Discrete energy I(u) = 1/2 ||u||^2 - trapz W(t, u) on a uniform grid with
/// homogeneous Dirichlet ends, where
///   ||u||^2 = u^T A u + lambda * sum_i (M_i u_i, u_i)
/// with M_i = lumped_weight(L, grid, i)
/// and A is the stiffness form (optionally integrated over tail rows past the
/// right end). Without a weight the lambda term is absent.
///
/// Unknowns ("dofs") are the interior nodes, node-major. The Gram matrix of
/// the norm is assembled densely and Cholesky-factored once; every solve and
/// evaluation afterwards is const and safe to call from several threads.
class DiscreteProblem {
public:
  struct Setup {
    FracOrder order{0.75};
    Grid1D grid{0.0, 1.0, 3};
    std::size_t n_components = 1;
    double lambda = 1.0;
    PotentialSpec potential;
    std::optional<WeightSpec> weight;
    std::size_t tail_rows = 0;
  };

  explicit DiscreteProblem(Setup setup);

  FracOrder order() const noexcept { return setup_.order; }
  const Grid1D& grid() const noexcept { return setup_.grid; }
  std::size_t n_components() const noexcept { return setup_.n_components; }
  double lambda() const noexcept { return setup_.lambda; }
  bool has_weight() const noexcept { return setup_.weight.has_value(); }
  const PotentialSpec& potential() const noexcept { return setup_.potential; }
  const std::optional<WeightSpec>& weight() const noexcept { return setup_.weight; }
  std::size_t tail_rows() const noexcept { return setup_.tail_rows; }
  const StiffnessForm& stiffness() const noexcept { return stiffness_; }

  Eigen::Index dofs() const noexcept { return gram_.rows(); }

  /// Interior values of u; throws std::invalid_argument if an end node is nonzero.
  Eigen::VectorXd restrict(const GridFunction& u) const;
  /// Grid function with the given interior values and zero end nodes.
  GridFunction extend(const Eigen::VectorXd& x) const;

  const Eigen::MatrixXd& gram() const noexcept { return gram_; }
  Eigen::VectorXd gram_apply(const Eigen::VectorXd& x) const { return gram_ * x; }
  Eigen::VectorXd gram_solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return x.dot(gram_ * y); }
  /// ||x||^2 as |U x|^2 with U the Cholesky factor. Rounding in the direct
  /// product x^T G x is amplified by the spread of G's spectrum; the factored
  /// form has a fixed bias of a few ulps and far less jitter, which keeps
  /// energy comparisons in the line search meaningful near convergence.
  double norm_sq(const Eigen::VectorXd& x) const {
    return (llt_.matrixU() * x).squaredNorm();
  }

  /// trapz W(t, sigma x).
  double potential_integral(const Eigen::VectorXd& x, double sigma = 1.0) const;
  /// h grad W(t_i, x_i) at each dof (dual vector of the potential term).
  Eigen::VectorXd potential_gradient(const Eigen::VectorXd& x) const;
  /// trapz (grad W(t, sigma x), x): the potential part of d/dsigma I(sigma x).
  double ray_slope(const Eigen::VectorXd& x, double sigma) const;
  /// sum_i (M_i x_i, x_i) without the lambda factor; zero when there is no weight.
  double weighted_mass(const Eigen::VectorXd& x) const;
  /// Lumped quadrature of l(t) |x|^2; zero when there is no weight.
  double scalar_weighted_mass(const Eigen::VectorXd& x) const;
  /// x^T A x, the fractional part of the norm.
  double stiffness_energy(const Eigen::VectorXd& x) const;

  /// Discrete Euler-Lagrange residual assembled matrix-free from the left and
  /// right GL operators: h D_R D_L x + lambda M x - h grad W(x), at the dofs.
  Eigen::VectorXd strong_form_residual(const Eigen::VectorXd& x) const;

private:
  std::size_t node_of(Eigen::Index dof) const {
    return 1 + static_cast<std::size_t>(dof) / setup_.n_components;
  }

  Setup setup_;
  StiffnessForm stiffness_;
  std::vector<double> dof_t_;          // node time for each interior node
  std::vector<Eigen::MatrixXd> l_blocks_;  // lumped weight at interior nodes, without lambda
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

} // namespace fracham
