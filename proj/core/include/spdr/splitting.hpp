#pragma once

#include <limits>
#include <vector>

#include "spdr/resolvents.hpp"

namespace spdr {

struct DrOpts {
  double lambda = 0.5;
  int max_iterations = 300;
  double stop_tol = 1e-8;  // on the successive difference |v_{n+1} - v_n|
  SolverOpts solver;
};

struct IterationDiagnostics {
  int n = 0;
  double dv = std::numeric_limits<double>::quiet_NaN();
  double err_V = std::numeric_limits<double>::quiet_NaN();  // vs reference, if given
  double err_H = std::numeric_limits<double>::quiet_NaN();
  double stationary_residual = 0.0;
  double evolution_residual = 0.0;
  int newton_iters = 0;
};

// Douglas-Rachford state in the V geometry: v drives the iteration,
//   y_n = (I + lambda A*)^{-1} v_n,
//   z_{n+1} = (I + lambda B*)^{-1} (2 y_n - v_n),
//   v_{n+1} = z_{n+1} + v_n - y_n.
struct DrState {
  int n = 0;
  PathField v, y, z;
  IterationDiagnostics last;
};

DrState dr_init(PathField v0);

void dr_step(DrState& state, const MonotoneOperator& op, const WienerPath& path,
             const Eigen::VectorXd& x0, double lambda, const SolverOpts& opts);

struct SplitRunResult {
  PathField x;  // e^W y at the final iterate
  PathField y, v;
  std::vector<IterationDiagnostics> history;
  bool converged = false;
  int iterations = 0;
};

// Iterate dr_step until |v_{n+1} - v_n| in the weighted V path norm drops
// below stop_tol or the iteration cap is hit (history is returned either
// way). v0 defaults to the initial datum lifted constant in time; x_ref, if
// given, is the reference solution in X-coordinates used for per-iteration
// error rows.
SplitRunResult dr_solve(const MonotoneOperator& op, const WienerPath& path, const Eigen::VectorXd& x0,
                        const DrOpts& opts, const PathField* v0 = nullptr,
                        const PathField* x_ref = nullptr);

// One sweep of the solution map on X-iterates:
//   X+ = (lambda(A - nu I) + J)^{-1} [ J F((lambda(nu I - A) + J) X) + lambda (A - nu I) X ],
// where F solves the per-step linear evolution equation. Iterating this from
// e^W (I + lambda A*)^{-1} v_0 reproduces the dr_solve X-iterates.
PathField x_fixed_point_map(const MonotoneOperator& op, const WienerPath& path,
                            const Eigen::VectorXd& x0, double lambda, const PathField& x,
                            const SolverOpts& opts);

struct HSplitRunResult {
  PathField x;  // e^W (I + lambda A1*)^{-1} v at the final iterate
  PathField u, v, ztilde;
  PathField y_weighted, v_weighted;  // e^W ztilde, e^W v
  std::vector<IterationDiagnostics> history;
  bool converged = false;
  int iterations = 0;
};

// H-geometry scheme (requires lambda nu < 1): same recursion with the
// pointwise stationary resolvent and the diagonal evolution resolvent;
// successive differences are measured in the weighted H path norm.
HSplitRunResult dr_solve_h(const MonotoneOperator& op, const WienerPath& path,
                           const Eigen::VectorXd& x0, const DrOpts& opts,
                           const PathField* v0 = nullptr, const PathField* x_ref = nullptr);

}  // namespace spdr
