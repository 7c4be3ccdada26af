#include "spdr/splitting.hpp"

#include <stdexcept>

namespace spdr {

DrState dr_init(PathField v0) {
  DrState s;
  s.v = std::move(v0);
  return s;
}

void dr_step(DrState& state, const MonotoneOperator& op, const WienerPath& path,
             const Eigen::VectorXd& x0, double lambda, const SolverOpts& opts) {
  const GelfandTriple& triple = op.triple();
  ResolventResult ra = stationary_resolvent(op, path, lambda, state.v, opts);
  const PathField g = 2.0 * ra.field - state.v;
  ResolventResult rb = evolution_resolvent(triple, path, lambda, x0, g);
  PathField v_next = rb.field + state.v - ra.field;

  state.last = IterationDiagnostics{};
  state.last.n = state.n;
  state.last.dv = weighted_path_norm_V(triple, path, v_next - state.v);
  state.last.stationary_residual = ra.max_residual;
  state.last.evolution_residual = rb.max_residual;
  state.last.newton_iters = ra.max_newton_iters;

  state.y = std::move(ra.field);
  state.z = std::move(rb.field);
  state.v = std::move(v_next);
  ++state.n;
}

SplitRunResult dr_solve(const MonotoneOperator& op, const WienerPath& path, const Eigen::VectorXd& x0,
                        const DrOpts& opts, const PathField* v0, const PathField* x_ref) {
  if (opts.max_iterations < 1) throw std::invalid_argument("dr_solve: max_iterations must be >= 1");
  const GelfandTriple& triple = op.triple();
  DrState state = dr_init(v0 ? *v0 : constant_in_time(x0, path.steps));

  SplitRunResult out;
  out.history.reserve(16);
  while (state.n < opts.max_iterations) {
    dr_step(state, op, path, x0, opts.lambda, opts.solver);
    IterationDiagnostics row = state.last;
    if (x_ref) {
      const PathField x_n = weight_exp(path, state.y);
      row.err_V = path_norm_V(triple, path.dt, x_n - *x_ref);
      row.err_H = path_norm_H(triple, path.dt, x_n - *x_ref);
    }
    out.history.push_back(row);
    if (row.dv <= opts.stop_tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = state.n;
  out.x = weight_exp(path, state.y);
  out.y = std::move(state.y);
  out.v = std::move(state.v);
  return out;
}

PathField x_fixed_point_map(const MonotoneOperator& op, const WienerPath& path,
                            const Eigen::VectorXd& x0, double lambda, const PathField& x,
                            const SolverOpts& opts) {
  const GelfandTriple& triple = op.triple();
  const Laplacian& lap = triple.laplacian();
  const double nu = path.nu;
  const int cols = path.steps + 1;

  // shifted gradient term lambda (A - nu I) X and the linear-step forcing
  PathField adef(x.rows(), cols);
  PathField evo_rhs(x.rows(), cols);
  for (int k = 0; k < cols; ++k) {
    adef.col(k) = lambda * (op.apply(path.times[k], x.col(k)) - nu * x.col(k));
    evo_rhs.col(k) = path.exp_w_minus.col(k).cwiseProduct(lap.apply(x.col(k)) - adef.col(k));
  }
  ResolventResult evo = evolution_solve(triple, path, lambda, x0, evo_rhs);
  const PathField z_weighted = weight_exp(path, evo.field);

  PathField stat_rhs(x.rows(), cols);
  for (int k = 0; k < cols; ++k) stat_rhs.col(k) = lap.apply(z_weighted.col(k)) + adef.col(k);
  return stationary_solve(op, path, lambda, stat_rhs, z_weighted, opts).field;
}

HSplitRunResult dr_solve_h(const MonotoneOperator& op, const WienerPath& path,
                           const Eigen::VectorXd& x0, const DrOpts& opts, const PathField* v0,
                           const PathField* x_ref) {
  if (opts.max_iterations < 1) throw std::invalid_argument("dr_solve_h: max_iterations must be >= 1");
  const GelfandTriple& triple = op.triple();
  PathField v = v0 ? *v0 : constant_in_time(x0, path.steps);

  HSplitRunResult out;
  PathField u, z;
  while (out.iterations < opts.max_iterations) {
    ResolventResult ra = stationary_resolvent_h(op, path, opts.lambda, v, opts.solver);
    const PathField g = 2.0 * ra.field - v;
    ResolventResult rb = evolution_resolvent_h(path, opts.lambda, x0, g);
    PathField v_next = rb.field + v - ra.field;

    IterationDiagnostics row;
    row.n = out.iterations;
    row.dv = weighted_path_norm_H(triple, path, v_next - v);
    row.stationary_residual = ra.max_residual;
    row.evolution_residual = rb.max_residual;
    row.newton_iters = ra.max_newton_iters;
    if (x_ref) {
      const PathField x_n = weight_exp(path, ra.field);
      row.err_V = path_norm_V(triple, path.dt, x_n - *x_ref);
      row.err_H = path_norm_H(triple, path.dt, x_n - *x_ref);
    }
    out.history.push_back(row);

    u = std::move(ra.field);
    z = std::move(rb.field);
    v = std::move(v_next);
    ++out.iterations;
    if (row.dv <= opts.stop_tol) {
      out.converged = true;
      break;
    }
  }
  // the returned solution applies the stationary resolvent to the final v
  ResolventResult fin = stationary_resolvent_h(op, path, opts.lambda, v, opts.solver);
  out.x = weight_exp(path, fin.field);
  out.u = std::move(fin.field);
  out.ztilde = z;
  out.y_weighted = weight_exp(path, z);
  out.v_weighted = weight_exp(path, v);
  out.v = std::move(v);
  return out;
}

}  // namespace spdr
