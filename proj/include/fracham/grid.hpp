#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracham {

/// Uniform mesh on [a, b] with nodes t_i = a + i*h, i = 0..n_nodes-1.
class Grid1D {
public:
  Grid1D(double a, double b, std::size_t n_nodes);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t n_nodes() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  double t(std::size_t i) const noexcept { return a_ + static_cast<double>(i) * h_; }
  std::vector<double> nodes() const;

  /// Index of the node that coincides with t. Throws std::invalid_argument
  /// when t is off the lattice by more than tol*h or outside [a, b].
  std::size_t aligned_index(double t, double tol = 1e-8) const;

  bool operator==(const Grid1D&) const = default;

private:
  double a_;
  double b_;
  std::size_t n_;
  double h_;
};

/// Vector-valued nodal samples, stored node-major: values[i*n_components + c].
class GridFunction {
public:
  GridFunction(Grid1D grid, std::size_t n_components);
  GridFunction(Grid1D grid, std::size_t n_components, std::vector<double> values);

  /// Scalar function sampled at the nodes (n_components = 1).
  static GridFunction sample(const Grid1D& grid, const std::function<double(double)>& f);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t n_components() const noexcept { return n_comp_; }
  std::size_t n_nodes() const noexcept { return grid_.n_nodes(); }

  double& operator()(std::size_t node, std::size_t comp) { return values_[node * n_comp_ + comp]; }
  double operator()(std::size_t node, std::size_t comp) const { return values_[node * n_comp_ + comp]; }

  std::span<const double> node(std::size_t i) const {
    return {values_.data() + i * n_comp_, n_comp_};
  }
  std::span<double> node(std::size_t i) { return {values_.data() + i * n_comp_, n_comp_}; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::vector<double> component(std::size_t c) const;
  void set_component(std::size_t c, std::span<const double> v);

  /// Euclidean magnitude |u(t_i)| at a node.
  double magnitude(std::size_t i) const;
  double max_magnitude() const;
  bool all_finite() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

private:
  void check_compatible(const GridFunction& other) const;

  Grid1D grid_;
  std::size_t n_comp_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction lhs, const GridFunction& rhs);
GridFunction operator-(GridFunction lhs, const GridFunction& rhs);
GridFunction operator*(double s, GridFunction u);

} // namespace fracham
