#include "spdr/reference.hpp"

#include <sstream>

namespace spdr {

namespace {

Eigen::VectorXd step_defect(const MonotoneOperator& op, const WienerPath& path, double t, int k,
                            const Eigen::VectorXd& yk, const Eigen::VectorXd& yprev) {
  const Eigen::VectorXd xk = path.exp_w_plus.col(k).cwiseProduct(yk);
  return (yk - yprev) / path.dt + path.exp_w_minus.col(k).cwiseProduct(op.apply(t, xk)) +
         path.mu_field.cwiseProduct(yk);
}

}  // namespace

ReferenceSolution reference_solve(const MonotoneOperator& op, const WienerPath& path,
                                  const Eigen::VectorXd& x0, const SolverOpts& opts) {
  const GelfandTriple& triple = op.triple();
  const Laplacian& lap = triple.laplacian();
  const int cols = path.steps + 1;

  ReferenceSolution out;
  out.y.resize(x0.size(), cols);
  out.y.col(0) = x0;
  out.residuals = Eigen::VectorXd::Zero(path.steps);

  for (int k = 1; k < cols; ++k) {
    const double t = path.times[k];
    const Eigen::VectorXd yprev = out.y.col(k - 1);
    Eigen::VectorXd y = yprev;
    Eigen::VectorXd F = step_defect(op, path, t, k, y, yprev);
    double res = triple.norm_Vdual(F);
    int it = 0;
    while (res > opts.newton_tol) {
      if (++it > opts.max_newton) {
        std::ostringstream msg;
        msg << "reference solve: Newton stalled at step " << k << " (residual " << res << ")";
        throw SolverError(SolverError::Code::newton_diverged, k, msg.str());
      }
      const Eigen::VectorXd xk = path.exp_w_plus.col(k).cwiseProduct(y);
      Tridiagonal m = op.jacobian(t, xk).sandwich(path.exp_w_minus.col(k), path.exp_w_plus.col(k));
      m.shift_diagonal((path.mu_field.array() + 1.0 / path.dt).matrix());
      TridiagonalSolver lu(m);
      bool accepted = false;
      if (!lu.singular()) {
        const Eigen::VectorXd dy = -lu.solve(F);
        double s = 1.0;
        while (s > 1e-7) {
          const Eigen::VectorXd yt = y + s * dy;
          const Eigen::VectorXd Ft = step_defect(op, path, t, k, yt, yprev);
          const double rt = triple.norm_Vdual(Ft);
          if (rt <= (1.0 - 1e-4 * s) * res) {
            y = yt;
            F = Ft;
            res = rt;
            accepted = true;
            break;
          }
          s *= opts.damping;
        }
      }
      if (!accepted) {
        y -= path.dt / (1.0 + op.constants().gamma1) * lap.solve(F);
        F = step_defect(op, path, t, k, y, yprev);
        res = triple.norm_Vdual(F);
      }
    }
    out.y.col(k) = y;
    out.residuals[k - 1] = res;
    out.max_newton_iters = std::max(out.max_newton_iters, it);
  }
  out.x = weight_exp(path, out.y);
  return out;
}

Eigen::VectorXd residual_certificate(const MonotoneOperator& op, const WienerPath& path,
                                     const PathField& x) {
  const GelfandTriple& triple = op.triple();
  const PathField y = unweight_exp(path, x);
  Eigen::VectorXd defects(path.steps);
  for (int k = 1; k <= path.steps; ++k) {
    defects[k - 1] =
        triple.norm_Vdual(step_defect(op, path, path.times[k], k, y.col(k), y.col(k - 1)));
  }
  return defects;
}

}  // namespace spdr
