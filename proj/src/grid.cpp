#include "fracham/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracham {

Grid1D::Grid1D(double a, double b, std::size_t n_nodes) : a_(a), b_(b), n_(n_nodes), h_(0.0) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b))
    throw std::invalid_argument("Grid1D: need finite a < b");
  if (n_nodes < 3)
    throw std::invalid_argument("Grid1D: need at least 3 nodes");
  h_ = (b - a) / static_cast<double>(n_nodes - 1);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    out[i] = t(i);
  return out;
}

std::size_t Grid1D::aligned_index(double t, double tol) const {
  const double x = (t - a_) / h_;
  const double r = std::round(x);
  if (std::abs(x - r) > tol || r < 0.0 || r > static_cast<double>(n_ - 1))
    throw std::invalid_argument("Grid1D: point " + std::to_string(t) + " is not a grid node");
  return static_cast<std::size_t>(r);
}

GridFunction::GridFunction(Grid1D grid, std::size_t n_components)
    : grid_(grid), n_comp_(n_components), values_(grid.n_nodes() * n_components, 0.0) {
  if (n_components == 0)
    throw std::invalid_argument("GridFunction: n_components must be positive");
}

GridFunction::GridFunction(Grid1D grid, std::size_t n_components, std::vector<double> values)
    : grid_(grid), n_comp_(n_components), values_(std::move(values)) {
  if (n_components == 0)
    throw std::invalid_argument("GridFunction: n_components must be positive");
  if (values_.size() != grid_.n_nodes() * n_comp_)
    throw std::invalid_argument("GridFunction: values length must be n_nodes * n_components");
  if (!all_finite())
    throw std::invalid_argument("GridFunction: non-finite entry");
}

GridFunction GridFunction::sample(const Grid1D& grid, const std::function<double(double)>& f) {
  GridFunction u(grid, 1);
  for (std::size_t i = 0; i < grid.n_nodes(); ++i)
    u(i, 0) = f(grid.t(i));
  return u;
}

std::vector<double> GridFunction::component(std::size_t c) const {
  std::vector<double> out(n_nodes());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (*this)(i, c);
  return out;
}

void GridFunction::set_component(std::size_t c, std::span<const double> v) {
  if (v.size() != n_nodes() || c >= n_comp_)
    throw std::invalid_argument("GridFunction::set_component: shape mismatch");
  for (std::size_t i = 0; i < v.size(); ++i)
    (*this)(i, c) = v[i];
}

double GridFunction::magnitude(std::size_t i) const {
  double s = 0.0;
  for (double x : node(i))
    s += x * x;
  return std::sqrt(s);
}

double GridFunction::max_magnitude() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_nodes(); ++i)
    m = std::max(m, magnitude(i));
  return m;
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void GridFunction::check_compatible(const GridFunction& other) const {
  if (!(grid_ == other.grid_) || n_comp_ != other.n_comp_)
    throw std::invalid_argument("GridFunction: grid or component mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < values_.size(); ++k)
    values_[k] += other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < values_.size(); ++k)
    values_[k] -= other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& x : values_)
    x *= s;
  return *this;
}

GridFunction operator+(GridFunction lhs, const GridFunction& rhs) { return lhs += rhs; }
GridFunction operator-(GridFunction lhs, const GridFunction& rhs) { return lhs -= rhs; }
GridFunction operator*(double s, GridFunction u) { return u *= s; }

} // namespace fracham
