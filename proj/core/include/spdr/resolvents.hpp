#pragma once

#include "spdr/errors.hpp"
#include "spdr/operators.hpp"
#include "spdr/path_field.hpp"

namespace spdr {

struct SolverOpts {
  double newton_tol = 1e-10;  // residual tolerance in the discrete V' norm
  int max_newton = 50;
  double damping = 0.5;  // line-search backtracking factor
};

struct ResolventResult {
  PathField field;
  double max_residual = 0.0;
  int max_newton_iters = 0;
};

// Per-node nonlinear solve  L X_k + lambda (A(t_k) X_k - nu X_k) = rhs_k,
// Newton with backtracking on the V' residual norm; nodes are independent.
ResolventResult stationary_solve(const MonotoneOperator& op, const WienerPath& path, double lambda,
                                 const PathField& rhs, const PathField& init, const SolverOpts& opts);

// y = (I + lambda A*)^{-1} v: per node, X_k = e^{W_k} y_k solves
//   L X_k + lambda A(t_k) X_k - lambda nu X_k = L (e^{W_k} v_k).
ResolventResult stationary_resolvent(const MonotoneOperator& op, const WienerPath& path,
                                     double lambda, const PathField& v, const SolverOpts& opts);

// Backward-Euler evolution solve with z_0 = x0 and, for k = 1..K,
//   Lam_k z_k + lambda ((z_k - z_{k-1})/dt + (mu + nu) z_k) = rhs_k,
// where Lam_k = D_{e^{-W_k}} L D_{e^{W_k}}. The step matrix is similar to
// the k-independent SPD tridiagonal L + (lambda/dt + lambda nu) I
// + lambda diag(mu), factorized once.
ResolventResult evolution_solve(const GelfandTriple& triple, const WienerPath& path, double lambda,
                                const Eigen::VectorXd& x0, const PathField& rhs);

// z = (I + lambda B*)^{-1} g with z(0) = x0: the above with rhs_k = Lam_k g_k.
ResolventResult evolution_resolvent(const GelfandTriple& triple, const WienerPath& path,
                                    double lambda, const Eigen::VectorXd& x0, const PathField& g);

// H-geometry stationary resolvent (requires lambda nu < 1): per node,
// U = e^{W_k} u solves (1 - lambda nu) U + lambda A(t_k) U = e^{W_k} v_k in
// discrete H; residuals in the H norm. init, when given, is in u-coordinates.
ResolventResult stationary_resolvent_h(const MonotoneOperator& op, const WienerPath& path,
                                       double lambda, const PathField& v, const SolverOpts& opts,
                                       const PathField* init = nullptr);

// H-geometry evolution resolvent: z + lambda (dz/dt + (mu + nu) z) = g,
// z(0) = x0; diagonal backward-Euler update per node.
ResolventResult evolution_resolvent_h(const WienerPath& path, double lambda,
                                      const Eigen::VectorXd& x0, const PathField& g);

}  // namespace spdr
