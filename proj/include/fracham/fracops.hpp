#pragma once

#include "fracham/grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace fracham {

/// Order alpha of a one-sided fractional derivative. Operators accept
/// 0 < alpha <= 1; problem setup additionally demands 1/2 < alpha < 1.
class FracOrder {
public:
  explicit FracOrder(double alpha);
  double alpha() const noexcept { return alpha_; }
  /// Throws std::invalid_argument unless 1/2 < alpha < 1.
  void require_problem_range() const;
  bool operator==(const FracOrder&) const = default;

private:
  double alpha_;
};

/// Unscaled Grünwald-Letnikov coefficients w_0..w_count, w_k = (-1)^k binom(alpha, k).
std::vector<double> gl_weights(FracOrder order, std::size_t count);

enum class Side { left, right };

/// Lower (left) or upper (right) triangular Toeplitz matrix of scaled GL
/// weights h^{-alpha} w_k. The right-sided operator is the exact transpose of
/// the left-sided one on the same grid.
class FracOpMatrix {
public:
  FracOpMatrix(FracOrder order, Grid1D grid, Side side);

  FracOrder order() const noexcept { return order_; }
  const Grid1D& grid() const noexcept { return grid_; }
  Side side() const noexcept { return side_; }
  /// Scaled weights, weights()[0] == h^{-alpha}.
  std::span<const double> weights() const noexcept { return weights_; }

  /// Direct O(N^2) action on one scalar component.
  std::vector<double> apply(std::span<const double> u) const;
  /// Same action through FFT convolution, O(N log N).
  std::vector<double> apply_fft(std::span<const double> u) const;
  /// Componentwise action; throws on grid mismatch.
  GridFunction apply(const GridFunction& u) const;

  FracOpMatrix transposed() const;
  Eigen::MatrixXd dense() const;

private:
  FracOrder order_;
  Grid1D grid_;
  Side side_;
  std::vector<double> weights_;
};

/// (D_L u)_i = h^{-alpha} sum_{k=0}^{i} w_k u_{i-k}, componentwise.
GridFunction left_frac_derivative(const GridFunction& u, FracOrder order);
/// (D_R u)_i = h^{-alpha} sum_{k=0}^{N-1-i} w_k u_{i+k}, componentwise.
GridFunction right_frac_derivative(const GridFunction& u, FracOrder order);

/// Discrete fractional Dirichlet form A = h D_L^T D_L so that u^T A u
/// approximates the integral of |D^alpha u|^2.
///
/// With tail_rows > 0 the derivative is also integrated over tail_rows
/// additional nodes past the right end of the grid, on which u is taken to be
/// zero. This gives the whole-line energy of a function supported on the grid.
class StiffnessForm {
public:
  StiffnessForm(FracOrder order, Grid1D grid, std::size_t tail_rows = 0);

  FracOrder order() const noexcept { return order_; }
  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t tail_rows() const noexcept { return tail_rows_; }

  /// A u for one scalar component, direct O(N^2).
  std::vector<double> apply(std::span<const double> u) const;
  /// A u through FFT Toeplitz products, O(N log N).
  std::vector<double> apply_fft(std::span<const double> u) const;
  /// u^T A u for one scalar component.
  double quadratic(std::span<const double> u) const;
  /// Sum over components of u_c^T A v_c.
  double bilinear(const GridFunction& u, const GridFunction& v) const;
  double energy(const GridFunction& u) const { return bilinear(u, u); }

  /// Dense n_nodes x n_nodes matrix, assembled in O(N^2) from the Toeplitz
  /// recurrence A_{j,k} = A_{j+1,k+1} + h^{1-2a} w_{M-1-j} w_{M-1-k}.
  Eigen::MatrixXd dense() const;

private:
  FracOrder order_;
  Grid1D grid_;
  std::size_t tail_rows_;
  std::vector<double> weights_; // scaled, length n_nodes + tail_rows
};

StiffnessForm stiffness_form(FracOrder order, const Grid1D& grid);

/// Spectral semi-norm (sum |omega_k|^{2 alpha} |u_hat_k|^2 d_omega / 2 pi)^{1/2},
/// summed over components, with u_hat the trapezoidal Fourier transform on a
/// zero-padded window. Throws DecayError when the end values exceed
/// decay_tol * max|u|.
double fourier_seminorm(const GridFunction& u, FracOrder order, double decay_tol = 1e-3);

} // namespace fracham
