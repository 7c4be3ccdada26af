#include "spdr/spaces.hpp"

#include <cmath>
#include <stdexcept>

namespace spdr {

Grid build_grid(int n_interior) {
  if (n_interior < 2) throw std::invalid_argument("build_grid: n_interior must be >= 2");
  Grid g;
  g.n_interior = n_interior;
  g.h = 1.0 / (n_interior + 1);
  g.nodes.resize(n_interior);
  for (int i = 0; i < n_interior; ++i) g.nodes[i] = (i + 1) * g.h;
  return g;
}

namespace {
Tridiagonal laplacian_stencil(const Grid& grid) {
  const int n = grid.n_interior;
  const double w = 1.0 / (grid.h * grid.h);
  Tridiagonal m;
  m.sub = Eigen::VectorXd::Constant(n - 1, -w);
  m.diag = Eigen::VectorXd::Constant(n, 2.0 * w);
  m.sup = Eigen::VectorXd::Constant(n - 1, -w);
  return m;
}
}  // namespace

Laplacian::Laplacian(const Grid& grid)
    : h_(grid.h), n_(grid.n_interior), nodes_(grid.nodes), mat_(laplacian_stencil(grid)), solver_(mat_) {}

double Laplacian::eigenvalue(int k) const {
  const double s = std::sin(0.5 * k * M_PI * h_);
  return 4.0 / (h_ * h_) * s * s;
}

Eigen::VectorXd Laplacian::eigenvector(int k) const {
  Eigen::VectorXd v(n_);
  for (int i = 0; i < n_; ++i) v[i] = std::sin(k * M_PI * nodes_[i]);
  return v;
}

GelfandTriple::GelfandTriple(Grid grid, TripleKind kind)
    : grid_(std::move(grid)), kind_(kind), lap_(grid_) {}

double GelfandTriple::norm_V(const Eigen::VectorXd& u) const {
  const int n = grid_.n_interior;
  const double h = grid_.h;
  if (kind_ == TripleKind::porous) return std::sqrt(h) * u.norm();
  // H^1_0 seminorm via edge differences; equals h u'Lu with Dirichlet zeros
  double acc = u[0] * u[0] + u[n - 1] * u[n - 1];
  for (int i = 0; i + 1 < n; ++i) {
    const double d = u[i + 1] - u[i];
    acc += d * d;
  }
  return std::sqrt(acc / h);
}

double GelfandTriple::norm_H(const Eigen::VectorXd& u) const {
  const double h = grid_.h;
  if (kind_ == TripleKind::standard) return std::sqrt(h) * u.norm();
  const double q = u.dot(lap_.solve(u));
  return std::sqrt(h * std::max(0.0, q));
}

double GelfandTriple::norm_Vdual(const Eigen::VectorXd& f) const {
  const double h = grid_.h;
  if (kind_ == TripleKind::standard) {
    const double q = f.dot(lap_.solve(f));
    return std::sqrt(h * std::max(0.0, q));
  }
  return std::sqrt(h) * lap_.solve(f).norm();
}

double GelfandTriple::inner_V(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  const double h = grid_.h;
  if (kind_ == TripleKind::porous) return h * u.dot(v);
  return h * u.dot(lap_.apply(v));
}

double GelfandTriple::inner_H(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  const double h = grid_.h;
  if (kind_ == TripleKind::standard) return h * u.dot(v);
  return h * u.dot(lap_.solve(v));
}

double GelfandTriple::pairing(const Eigen::VectorXd& f, const Eigen::VectorXd& v) const {
  const double h = grid_.h;
  if (kind_ == TripleKind::standard) return h * f.dot(v);
  return h * lap_.solve(f).dot(v);
}

}  // namespace spdr
