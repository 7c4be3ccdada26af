#include "spdr/resolvents.hpp"

#include <cmath>
#include <sstream>

namespace spdr {

namespace {

struct NewtonProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  std::function<Tridiagonal(const Eigen::VectorXd&)> jacobian;
  std::function<double(const Eigen::VectorXd&)> norm;
};

struct NewtonOutcome {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iters = 0;
};

// Damped Newton on the residual norm; falls back to a duality-preconditioned
// descent step x -= rho J^{-1} F when the Newton direction stalls.
NewtonOutcome newton_solve(const NewtonProblem& p, Eigen::VectorXd x, const Laplacian& lap,
                           double fallback_rho, const SolverOpts& opts, int node) {
  Eigen::VectorXd F = p.residual(x);
  double res = p.norm(F);
  int it = 0;
  while (res > opts.newton_tol) {
    if (++it > opts.max_newton) {
      std::ostringstream msg;
      msg << "Newton stalled at time node " << node << ": residual " << res << " > tol "
          << opts.newton_tol << " after " << opts.max_newton
          << " iterations (lambda too large for the monotonicity margin?)";
      throw SolverError(SolverError::Code::newton_diverged, node, msg.str());
    }
    bool accepted = false;
    TridiagonalSolver lu(p.jacobian(x));
    if (!lu.singular()) {
      const Eigen::VectorXd dx = -lu.solve(F);
      double s = 1.0;
      while (s > 1e-7) {
        const Eigen::VectorXd xt = x + s * dx;
        const Eigen::VectorXd Ft = p.residual(xt);
        const double rt = p.norm(Ft);
        if (rt <= (1.0 - 1e-4 * s) * res) {
          x = xt;
          F = Ft;
          res = rt;
          accepted = true;
          break;
        }
        s *= opts.damping;
      }
    }
    if (!accepted) {
      x -= fallback_rho * lap.solve(F);
      F = p.residual(x);
      res = p.norm(F);
    }
  }
  return {std::move(x), res, it};
}

}  // namespace

ResolventResult stationary_solve(const MonotoneOperator& op, const WienerPath& path, double lambda,
                                 const PathField& rhs, const PathField& init, const SolverOpts& opts) {
  if (!(lambda > 0.0)) throw std::invalid_argument("stationary_solve: lambda must be positive");
  const GelfandTriple& triple = op.triple();
  const Laplacian& lap = triple.laplacian();
  const double nu = path.nu;
  const int cols = static_cast<int>(rhs.cols());
  const double rho = 1.0 / (1.0 + lambda * op.constants().gamma1);

  ResolventResult out;
  out.field.resize(rhs.rows(), cols);
  for (int k = 0; k < cols; ++k) {
    const double t = path.times[k];
    NewtonProblem p;
    p.residual = [&, t, k](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return lap.apply(x) + lambda * (op.apply(t, x) - nu * x) - rhs.col(k);
    };
    p.jacobian = [&, t](const Eigen::VectorXd& x) {
      Tridiagonal m = op.jacobian(t, x);
      m.scale(lambda);
      m.add_scaled(1.0, lap.matrix());
      m.shift_diagonal(-lambda * nu);
      return m;
    };
    p.norm = [&](const Eigen::VectorXd& f) { return triple.norm_Vdual(f); };
    NewtonOutcome sol = newton_solve(p, init.col(k), lap, rho, opts, k);
    out.field.col(k) = sol.x;
    out.max_residual = std::max(out.max_residual, sol.residual);
    out.max_newton_iters = std::max(out.max_newton_iters, sol.iters);
  }
  return out;
}

ResolventResult stationary_resolvent(const MonotoneOperator& op, const WienerPath& path,
                                     double lambda, const PathField& v, const SolverOpts& opts) {
  const Laplacian& lap = op.triple().laplacian();
  const int cols = static_cast<int>(v.cols());
  PathField rhs(v.rows(), cols);
  PathField init = path.exp_w_plus.cwiseProduct(v);
  for (int k = 0; k < cols; ++k) rhs.col(k) = lap.apply(init.col(k));
  ResolventResult out = stationary_solve(op, path, lambda, rhs, init, opts);
  out.field = path.exp_w_minus.cwiseProduct(out.field);
  return out;
}

ResolventResult evolution_solve(const GelfandTriple& triple, const WienerPath& path, double lambda,
                                const Eigen::VectorXd& x0, const PathField& rhs) {
  if (!(lambda > 0.0)) throw std::invalid_argument("evolution_solve: lambda must be positive");
  const Laplacian& lap = triple.laplacian();
  const double dt = path.dt;
  const double tau = lambda / dt;

  Tridiagonal step = lap.matrix();
  step.shift_diagonal(tau + lambda * path.nu);
  step.shift_diagonal(lambda * path.mu_field);
  TridiagonalSolver solver(step);

  const int cols = path.steps + 1;
  ResolventResult out;
  out.field.resize(x0.size(), cols);
  out.field.col(0) = x0;
  for (int k = 1; k < cols; ++k) {
    const Eigen::VectorXd b = rhs.col(k) + tau * out.field.col(k - 1);
    out.field.col(k) = path.exp_w_minus.col(k).cwiseProduct(solver.solve(path.exp_w_plus.col(k).cwiseProduct(b)));
    // re-substitution defect of the backward-Euler equation
    const Eigen::VectorXd zk = out.field.col(k);
    const Eigen::VectorXd lam_z =
        path.exp_w_minus.col(k).cwiseProduct(lap.apply(path.exp_w_plus.col(k).cwiseProduct(zk)));
    const Eigen::VectorXd r = lam_z + lambda * ((zk - out.field.col(k - 1)) / dt + (path.mu_field.array() + path.nu).matrix().cwiseProduct(zk)) - rhs.col(k);
    out.max_residual = std::max(out.max_residual, triple.norm_Vdual(r));
  }
  return out;
}

ResolventResult evolution_resolvent(const GelfandTriple& triple, const WienerPath& path,
                                    double lambda, const Eigen::VectorXd& x0, const PathField& g) {
  const Laplacian& lap = triple.laplacian();
  const int cols = path.steps + 1;
  PathField rhs = PathField::Zero(g.rows(), cols);
  for (int k = 1; k < cols; ++k) {
    rhs.col(k) =
        path.exp_w_minus.col(k).cwiseProduct(lap.apply(path.exp_w_plus.col(k).cwiseProduct(g.col(k))));
  }
  return evolution_solve(triple, path, lambda, x0, rhs);
}

ResolventResult stationary_resolvent_h(const MonotoneOperator& op, const WienerPath& path,
                                       double lambda, const PathField& v, const SolverOpts& opts,
                                       const PathField* init) {
  if (!(lambda > 0.0)) throw std::invalid_argument("stationary_resolvent_h: lambda must be positive");
  if (lambda * path.nu >= 1.0) {
    std::ostringstream msg;
    msg << "lambda * nu = " << lambda * path.nu << " >= 1: the H-geometry stationary equation loses coercivity";
    throw SolverError(SolverError::Code::lambda_nu_too_large, -1, msg.str());
  }
  const GelfandTriple& triple = op.triple();
  const Laplacian& lap = triple.laplacian();
  const double a = 1.0 - lambda * path.nu;
  const int cols = static_cast<int>(v.cols());
  const double rho = 1.0 / (1.0 + lambda * op.constants().gamma1);

  ResolventResult out;
  out.field.resize(v.rows(), cols);
  for (int k = 0; k < cols; ++k) {
    const double t = path.times[k];
    const Eigen::VectorXd rhs = path.exp_w_plus.col(k).cwiseProduct(v.col(k));
    NewtonProblem p;
    p.residual = [&, t](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return a * x + lambda * op.apply(t, x) - rhs;
    };
    p.jacobian = [&, t](const Eigen::VectorXd& x) {
      Tridiagonal m = op.jacobian(t, x);
      m.scale(lambda);
      m.shift_diagonal(a);
      return m;
    };
    p.norm = [&](const Eigen::VectorXd& f) { return triple.norm_H(f); };
    const Eigen::VectorXd u0 = init ? path.exp_w_plus.col(k).cwiseProduct(init->col(k)).eval() : rhs;
    NewtonOutcome sol = newton_solve(p, u0, lap, rho, opts, k);
    out.field.col(k) = path.exp_w_minus.col(k).cwiseProduct(sol.x);
    out.max_residual = std::max(out.max_residual, sol.residual);
    out.max_newton_iters = std::max(out.max_newton_iters, sol.iters);
  }
  return out;
}

ResolventResult evolution_resolvent_h(const WienerPath& path, double lambda,
                                      const Eigen::VectorXd& x0, const PathField& g) {
  if (!(lambda > 0.0)) throw std::invalid_argument("evolution_resolvent_h: lambda must be positive");
  const double dt = path.dt;
  const double tau = lambda / dt;
  const Eigen::ArrayXd denom = 1.0 + lambda * path.nu + tau + lambda * path.mu_field.array();

  const int cols = path.steps + 1;
  ResolventResult out;
  out.field.resize(x0.size(), cols);
  out.field.col(0) = x0;
  const double h = 1.0 / (x0.size() + 1);
  for (int k = 1; k < cols; ++k) {
    out.field.col(k) = ((g.col(k) + tau * out.field.col(k - 1)).array() / denom).matrix();
    const Eigen::VectorXd zk = out.field.col(k);
    const Eigen::VectorXd r = zk + lambda * ((zk - out.field.col(k - 1)) / dt + (path.mu_field.array() + path.nu).matrix().cwiseProduct(zk)) - g.col(k);
    out.max_residual = std::max(out.max_residual, std::sqrt(h) * r.norm());
  }
  return out;
}

}  // namespace spdr
