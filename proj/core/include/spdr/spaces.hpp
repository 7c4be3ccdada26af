#pragma once

#include <Eigen/Core>

#include "spdr/tridiagonal.hpp"

namespace spdr {

// Uniform grid on (0,1); only interior nodes are stored, homogeneous
// Dirichlet values at xi = 0 and xi = 1 are implicit.
struct Grid {
  int n_interior = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;  // xi_i = (i+1) h
};

Grid build_grid(int n_interior);

enum class TripleKind {
  standard,  // V = H^1_0, H = L^2, V' = H^-1
  porous,    // V = L^2,  H = H^-1, V' = dual of L^2 with pivot H^-1
};

// Discrete -Laplacian with Dirichlet conditions: stencil (-1, 2, -1)/h^2.
class Laplacian {
 public:
  explicit Laplacian(const Grid& grid);

  const Tridiagonal& matrix() const { return mat_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return mat_.apply(u); }
  Eigen::VectorXd solve(const Eigen::VectorXd& f) const { return solver_.solve(f); }

  // k-th Dirichlet eigenpair, k = 1..n: (4/h^2) sin^2(k pi h/2) and sin(k pi xi).
  double eigenvalue(int k) const;
  Eigen::VectorXd eigenvector(int k) const;
  double lambda_min() const { return eigenvalue(1); }

 private:
  double h_;
  int n_;
  Eigen::VectorXd nodes_;
  Tridiagonal mat_;
  TridiagonalSolver solver_;
};

// Discrete Gelfand triple V c H c V'. All integrals use the rectangle rule
// with weight h on interior nodes; elements of V' are represented by the
// nodal values of the distribution, so the duality map J is the discrete
// -Laplacian for both triples.
class GelfandTriple {
 public:
  GelfandTriple(Grid grid, TripleKind kind);

  const Grid& grid() const { return grid_; }
  TripleKind kind() const { return kind_; }
  const Laplacian& laplacian() const { return lap_; }
  int n() const { return grid_.n_interior; }
  double h() const { return grid_.h; }
  double lambda_min() const { return lap_.lambda_min(); }

  double norm_V(const Eigen::VectorXd& u) const;
  double norm_H(const Eigen::VectorXd& u) const;
  double norm_Vdual(const Eigen::VectorXd& f) const;

  double inner_V(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  double inner_H(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  // duality pairing <f, v> between V' and V, with H as pivot
  double pairing(const Eigen::VectorXd& f, const Eigen::VectorXd& v) const;

  Eigen::VectorXd duality_map(const Eigen::VectorXd& u) const { return lap_.apply(u); }
  Eigen::VectorXd duality_solve(const Eigen::VectorXd& f) const { return lap_.solve(f); }

 private:
  Grid grid_;
  TripleKind kind_;
  Laplacian lap_;
};

}  // namespace spdr
