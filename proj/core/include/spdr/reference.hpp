#pragma once

#include "spdr/resolvents.hpp"

namespace spdr {

struct ReferenceSolution {
  PathField y;  // solution of the transformed pathwise equation
  PathField x;  // e^W y
  Eigen::VectorXd residuals;  // per-step Newton residuals, k = 1..K
  int max_newton_iters = 0;
};

// Ground-truth pathwise solver: backward Euler on
//   (y_k - y_{k-1})/dt + e^{-W_k} A(t_k)(e^{W_k} y_k) + mu y_k = 0,  y_0 = x0,
// Newton-solved per step in the discrete V' residual norm.
ReferenceSolution reference_solve(const MonotoneOperator& op, const WienerPath& path,
                                  const Eigen::VectorXd& x0, const SolverOpts& opts);

// Backward-Euler defect of a candidate solution in X-coordinates, per step in
// the V' norm; certifies any solver's output against the same discrete system.
Eigen::VectorXd residual_certificate(const MonotoneOperator& op, const WienerPath& path,
                                     const PathField& x);

}  // namespace spdr
