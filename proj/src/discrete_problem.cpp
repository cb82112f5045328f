#include "fracham/discrete_problem.hpp"

#include "fracham/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace fracham {

DiscreteProblem::DiscreteProblem(Setup setup)
    : setup_(std::move(setup)), stiffness_(setup_.order, setup_.grid, setup_.tail_rows) {
  if (setup_.n_components == 0)
    throw std::invalid_argument("DiscreteProblem: n_components must be positive");
  if (!setup_.potential.W || !setup_.potential.grad_W)
    throw std::invalid_argument("DiscreteProblem: potential is incomplete");
  if (setup_.weight) {
    if (!(setup_.lambda > 0.0))
      throw std::invalid_argument("DiscreteProblem: lambda must be positive");
    if (setup_.weight->n_components != setup_.n_components)
      throw std::invalid_argument("DiscreteProblem: weight component count mismatch");
  }

  const Grid1D& g = setup_.grid;
  const std::size_t n_int = g.n_nodes() - 2;
  const auto nc = static_cast<Eigen::Index>(setup_.n_components);
  const auto ndof = static_cast<Eigen::Index>(n_int) * nc;

  dof_t_.resize(n_int);
  for (std::size_t i = 0; i < n_int; ++i)
    dof_t_[i] = g.t(i + 1);

  const Eigen::MatrixXd a_full = stiffness_.dense();
  const auto ni = static_cast<Eigen::Index>(n_int);
  gram_ = Eigen::MatrixXd::Zero(ndof, ndof);
  if (nc == 1) {
    gram_ = a_full.block(1, 1, ni, ni);
  } else {
    for (Eigen::Index j = 0; j < ni; ++j)
      for (Eigen::Index k = 0; k < ni; ++k) {
        const double v = a_full(j + 1, k + 1);
        for (Eigen::Index c = 0; c < nc; ++c)
          gram_(j * nc + c, k * nc + c) = v;
      }
  }
  if (setup_.weight) {
    l_blocks_.reserve(n_int);
    for (std::size_t i = 0; i < n_int; ++i) {
      Eigen::MatrixXd li = lumped_weight(*setup_.weight, g, i + 1);
      if (li.rows() != nc || li.cols() != nc)
        throw std::invalid_argument("DiscreteProblem: L(t) has the wrong shape");
      const auto off = static_cast<Eigen::Index>(i) * nc;
      gram_.block(off, off, nc, nc) += setup_.lambda * li;
      l_blocks_.push_back(std::move(li));
    }
  }
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success)
    throw ConvergenceError("DiscreteProblem: Gram matrix is not positive definite");
}

Eigen::VectorXd DiscreteProblem::restrict(const GridFunction& u) const {
  if (!(u.grid() == setup_.grid) || u.n_components() != setup_.n_components)
    throw std::invalid_argument("DiscreteProblem::restrict: grid or component mismatch");
  const std::size_t last = u.n_nodes() - 1;
  if (u.magnitude(0) != 0.0 || u.magnitude(last) != 0.0)
    throw std::invalid_argument("DiscreteProblem::restrict: Dirichlet end values must be zero");
  const auto nc = setup_.n_components;
  Eigen::VectorXd x(dofs());
  for (std::size_t i = 1; i < last; ++i)
    for (std::size_t c = 0; c < nc; ++c)
      x[static_cast<Eigen::Index>((i - 1) * nc + c)] = u(i, c);
  return x;
}

GridFunction DiscreteProblem::extend(const Eigen::VectorXd& x) const {
  if (x.size() != dofs())
    throw std::invalid_argument("DiscreteProblem::extend: length mismatch");
  GridFunction u(setup_.grid, setup_.n_components);
  const auto nc = setup_.n_components;
  for (std::size_t i = 1; i + 1 < u.n_nodes(); ++i)
    for (std::size_t c = 0; c < nc; ++c)
      u(i, c) = x[static_cast<Eigen::Index>((i - 1) * nc + c)];
  return u;
}

double DiscreteProblem::potential_integral(const Eigen::VectorXd& x, double sigma) const {
  const std::size_t nc = setup_.n_components;
  std::vector<double> ui(nc);
  long double s = 0.0L;
  for (std::size_t i = 0; i < dof_t_.size(); ++i) {
    bool zero = true;
    for (std::size_t c = 0; c < nc; ++c) {
      ui[c] = sigma * x[static_cast<Eigen::Index>(i * nc + c)];
      zero = zero && ui[c] == 0.0;
    }
    if (!zero)
      s += setup_.potential.W(dof_t_[i], ui);
  }
  return static_cast<double>(setup_.grid.h() * s);
}

Eigen::VectorXd DiscreteProblem::potential_gradient(const Eigen::VectorXd& x) const {
  const std::size_t nc = setup_.n_components;
  const double h = setup_.grid.h();
  Eigen::VectorXd out(x.size());
  std::vector<double> ui(nc), gi(nc);
  for (std::size_t i = 0; i < dof_t_.size(); ++i) {
    for (std::size_t c = 0; c < nc; ++c)
      ui[c] = x[static_cast<Eigen::Index>(i * nc + c)];
    setup_.potential.grad_W(dof_t_[i], ui, gi);
    for (std::size_t c = 0; c < nc; ++c)
      out[static_cast<Eigen::Index>(i * nc + c)] = h * gi[c];
  }
  return out;
}

double DiscreteProblem::ray_slope(const Eigen::VectorXd& x, double sigma) const {
  const std::size_t nc = setup_.n_components;
  std::vector<double> ui(nc), gi(nc);
  long double s = 0.0L;
  for (std::size_t i = 0; i < dof_t_.size(); ++i) {
    bool zero = true;
    for (std::size_t c = 0; c < nc; ++c) {
      ui[c] = sigma * x[static_cast<Eigen::Index>(i * nc + c)];
      zero = zero && ui[c] == 0.0;
    }
    if (zero)
      continue;
    setup_.potential.grad_W(dof_t_[i], ui, gi);
    for (std::size_t c = 0; c < nc; ++c)
      s += gi[c] * x[static_cast<Eigen::Index>(i * nc + c)];
  }
  return static_cast<double>(setup_.grid.h() * s);
}

double DiscreteProblem::weighted_mass(const Eigen::VectorXd& x) const {
  if (!setup_.weight)
    return 0.0;
  const auto nc = static_cast<Eigen::Index>(setup_.n_components);
  double s = 0.0;
  for (std::size_t i = 0; i < l_blocks_.size(); ++i) {
    const auto xi = x.segment(static_cast<Eigen::Index>(i) * nc, nc);
    s += xi.dot(l_blocks_[i] * xi);
  }
  return s;
}

double DiscreteProblem::scalar_weighted_mass(const Eigen::VectorXd& x) const {
  if (!setup_.weight)
    return 0.0;
  const auto nc = static_cast<Eigen::Index>(setup_.n_components);
  double s = 0.0;
  for (std::size_t i = 0; i < dof_t_.size(); ++i)
    s += lumped_scalar_weight(*setup_.weight, setup_.grid, i + 1) *
         x.segment(static_cast<Eigen::Index>(i) * nc, nc).squaredNorm();
  return s;
}

double DiscreteProblem::stiffness_energy(const Eigen::VectorXd& x) const {
  const GridFunction u = extend(x);
  return stiffness_.energy(u);
}

Eigen::VectorXd DiscreteProblem::strong_form_residual(const Eigen::VectorXd& x) const {
  const GridFunction u = extend(x);
  const std::size_t nc = setup_.n_components;
  Eigen::VectorXd r(x.size());
  for (std::size_t c = 0; c < nc; ++c) {
    const std::vector<double> au = stiffness_.apply_fft(u.component(c));
    for (std::size_t i = 0; i < dof_t_.size(); ++i)
      r[static_cast<Eigen::Index>(i * nc + c)] = au[i + 1];
  }
  if (setup_.weight) {
    const auto n = static_cast<Eigen::Index>(nc);
    for (std::size_t i = 0; i < l_blocks_.size(); ++i) {
      const auto off = static_cast<Eigen::Index>(i) * n;
      r.segment(off, n) += setup_.lambda * (l_blocks_[i] * x.segment(off, n));
    }
  }
  r -= potential_gradient(x);
  return r;
}

} // namespace fracham
