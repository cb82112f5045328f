#include "fracham/fracops.hpp"

#include "fracham/errors.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracham {

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("FracOrder: alpha must lie in (0, 1]");
}

void FracOrder::require_problem_range() const {
  if (!(alpha_ > 0.5 && alpha_ < 1.0))
    throw std::invalid_argument("FracOrder: problems require 1/2 < alpha < 1");
}

std::vector<double> gl_weights(FracOrder order, std::size_t count) {
  if (count < 1)
    throw std::invalid_argument("gl_weights: count must be >= 1");
  std::vector<double> w(count + 1);
  w[0] = 1.0;
  const double a1 = order.alpha() + 1.0;
  for (std::size_t k = 1; k <= count; ++k)
    w[k] = w[k - 1] * (1.0 - a1 / static_cast<double>(k));
  return w;
}

namespace {

std::vector<double> scaled_weights(FracOrder order, double h, std::size_t n) {
  std::vector<double> w = gl_weights(order, std::max<std::size_t>(n, 2) - 1);
  w.resize(n);
  const double s = std::pow(h, -order.alpha());
  for (double& x : w)
    x *= s;
  return w;
}

void check_grid(const Grid1D& expected, const Grid1D& got) {
  if (!(expected == got))
    throw std::invalid_argument("fractional operator: grid mismatch");
}

} // namespace

FracOpMatrix::FracOpMatrix(FracOrder order, Grid1D grid, Side side)
    : order_(order), grid_(grid), side_(side),
      weights_(scaled_weights(order, grid.h(), grid.n_nodes())) {}

std::vector<double> FracOpMatrix::apply(std::span<const double> u) const {
  const std::size_t n = grid_.n_nodes();
  if (u.size() != n)
    throw std::invalid_argument("FracOpMatrix::apply: length mismatch");
  std::vector<double> out(n, 0.0);
  if (side_ == Side::left) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k <= i; ++k)
        s += weights_[k] * u[i - k];
      out[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; i + k < n; ++k)
        s += weights_[k] * u[i + k];
      out[i] = s;
    }
  }
  return out;
}

std::vector<double> FracOpMatrix::apply_fft(std::span<const double> u) const {
  if (u.size() != grid_.n_nodes())
    throw std::invalid_argument("FracOpMatrix::apply_fft: length mismatch");
  return side_ == Side::left ? fft::lower_toeplitz_apply(weights_, u)
                             : fft::upper_toeplitz_apply(weights_, u);
}

GridFunction FracOpMatrix::apply(const GridFunction& u) const {
  check_grid(grid_, u.grid());
  GridFunction out(u.grid(), u.n_components());
  for (std::size_t c = 0; c < u.n_components(); ++c)
    out.set_component(c, apply(std::span<const double>(u.component(c))));
  return out;
}

FracOpMatrix FracOpMatrix::transposed() const {
  return FracOpMatrix(order_, grid_, side_ == Side::left ? Side::right : Side::left);
}

Eigen::MatrixXd FracOpMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(grid_.n_nodes());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k <= i; ++k)
      m(i, i - k) = weights_[static_cast<std::size_t>(k)];
  if (side_ == Side::right)
    m.transposeInPlace();
  return m;
}

GridFunction left_frac_derivative(const GridFunction& u, FracOrder order) {
  return FracOpMatrix(order, u.grid(), Side::left).apply(u);
}

GridFunction right_frac_derivative(const GridFunction& u, FracOrder order) {
  return FracOpMatrix(order, u.grid(), Side::right).apply(u);
}

StiffnessForm::StiffnessForm(FracOrder order, Grid1D grid, std::size_t tail_rows)
    : order_(order), grid_(grid), tail_rows_(tail_rows),
      weights_(scaled_weights(order, grid.h(), grid.n_nodes() + tail_rows)) {}

std::vector<double> StiffnessForm::apply(std::span<const double> u) const {
  const std::size_t n = grid_.n_nodes();
  const std::size_t m = n + tail_rows_;
  if (u.size() != n)
    throw std::invalid_argument("StiffnessForm::apply: length mismatch");
  // v = D_L (u padded with zeros), then A u = h D_L^T v restricted to the grid.
  std::vector<double> v(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    const std::size_t kmin = i >= n ? i - (n - 1) : 0;
    for (std::size_t k = kmin; k <= i; ++k)
      s += weights_[k] * u[i - k];
    v[i] = s;
  }
  std::vector<double> out(n, 0.0);
  const double h = grid_.h();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; j + k < m; ++k)
      s += weights_[k] * v[j + k];
    out[j] = h * s;
  }
  return out;
}

std::vector<double> StiffnessForm::apply_fft(std::span<const double> u) const {
  const std::size_t n = grid_.n_nodes();
  const std::size_t m = n + tail_rows_;
  if (u.size() != n)
    throw std::invalid_argument("StiffnessForm::apply_fft: length mismatch");
  std::vector<double> padded(m, 0.0);
  std::copy(u.begin(), u.end(), padded.begin());
  std::vector<double> v = fft::lower_toeplitz_apply(weights_, padded);
  std::vector<double> w = fft::upper_toeplitz_apply(weights_, v);
  w.resize(n);
  for (double& x : w)
    x *= grid_.h();
  return w;
}

double StiffnessForm::quadratic(std::span<const double> u) const {
  const std::size_t n = grid_.n_nodes();
  const std::size_t m = n + tail_rows_;
  if (u.size() != n)
    throw std::invalid_argument("StiffnessForm::quadratic: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    const std::size_t kmin = i >= n ? i - (n - 1) : 0;
    for (std::size_t k = kmin; k <= i; ++k)
      s += weights_[k] * u[i - k];
    total += s * s;
  }
  return grid_.h() * total;
}

double StiffnessForm::bilinear(const GridFunction& u, const GridFunction& v) const {
  check_grid(grid_, u.grid());
  check_grid(grid_, v.grid());
  if (u.n_components() != v.n_components())
    throw std::invalid_argument("StiffnessForm::bilinear: component mismatch");
  double total = 0.0;
  for (std::size_t c = 0; c < u.n_components(); ++c) {
    const std::vector<double> vc = v.component(c);
    const std::vector<double> au = apply_fft(u.component(c));
    for (std::size_t i = 0; i < au.size(); ++i)
      total += au[i] * vc[i];
  }
  return total;
}

Eigen::MatrixXd StiffnessForm::dense() const {
  const std::size_t n = grid_.n_nodes();
  const std::size_t m = n + tail_rows_;
  const double h = grid_.h();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t d = 0; d < n; ++d) {
    // Corner entry A_{n-1-d, n-1}: rows i = n-1 .. m-1.
    double s = 0.0;
    for (std::size_t r = 0; r <= tail_rows_; ++r)
      s += weights_[r + d] * weights_[r];
    std::size_t j = n - 1 - d;
    std::size_t k = n - 1;
    double value = h * s;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = value;
    while (j > 0) {
      --j;
      --k;
      value += h * weights_[m - 1 - j] * weights_[m - 1 - k];
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = value;
    }
  }
  a.triangularView<Eigen::StrictlyLower>() = a.transpose().triangularView<Eigen::StrictlyLower>();
  return a;
}

StiffnessForm stiffness_form(FracOrder order, const Grid1D& grid) { return StiffnessForm(order, grid); }

double fourier_seminorm(const GridFunction& u, FracOrder order, double decay_tol) {
  const double peak = u.max_magnitude();
  if (peak == 0.0)
    return 0.0;
  const std::size_t n = u.n_nodes();
  const double edge = std::max(u.magnitude(0), u.magnitude(n - 1));
  if (edge > decay_tol * peak)
    throw DecayError("fourier_seminorm: function does not decay at the grid ends (edge/peak = " +
                     std::to_string(edge / peak) + ")");
  std::size_t p = 1;
  while (p < 2 * n)
    p <<= 1;
  const double h = u.grid().h();
  const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(p) * h);
  const double two_alpha = 2.0 * order.alpha();
  double total = 0.0;
  for (std::size_t c = 0; c < u.n_components(); ++c) {
    const std::vector<double> ps = fft::power_spectrum(u.component(c), p);
    for (std::size_t k = 1; k < ps.size(); ++k) {
      const double omega = d_omega * static_cast<double>(k);
      const double mult = (k == p / 2) ? 1.0 : 2.0; // conjugate-symmetric bins
      total += mult * std::pow(omega, two_alpha) * h * h * ps[k];
    }
  }
  return std::sqrt(total * d_omega / (2.0 * std::numbers::pi));
}

} // namespace fracham
