#include "spdr/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

#include "spdr/errors.hpp"

namespace spdr {

Tridiagonal Tridiagonal::zero(int n) {
  Tridiagonal m;
  m.sub = Eigen::VectorXd::Zero(n - 1);
  m.diag = Eigen::VectorXd::Zero(n);
  m.sup = Eigen::VectorXd::Zero(n - 1);
  return m;
}

Eigen::VectorXd Tridiagonal::apply(const Eigen::VectorXd& x) const {
  const int n = size();
  Eigen::VectorXd y = diag.cwiseProduct(x);
  y.head(n - 1) += sup.cwiseProduct(x.tail(n - 1));
  y.tail(n - 1) += sub.cwiseProduct(x.head(n - 1));
  return y;
}

void Tridiagonal::scale(double a) {
  sub *= a;
  diag *= a;
  sup *= a;
}

void Tridiagonal::add_scaled(double a, const Tridiagonal& m) {
  sub += a * m.sub;
  diag += a * m.diag;
  sup += a * m.sup;
}

void Tridiagonal::shift_diagonal(double c) { diag.array() += c; }

void Tridiagonal::shift_diagonal(const Eigen::VectorXd& d) { diag += d; }

Tridiagonal Tridiagonal::sandwich(const Eigen::VectorXd& left, const Eigen::VectorXd& right) const {
  const int n = size();
  Tridiagonal m;
  m.diag = left.cwiseProduct(diag).cwiseProduct(right);
  m.sub = left.tail(n - 1).cwiseProduct(sub).cwiseProduct(right.head(n - 1));
  m.sup = left.head(n - 1).cwiseProduct(sup).cwiseProduct(right.tail(n - 1));
  return m;
}

TridiagonalSolver::TridiagonalSolver(const Tridiagonal& m)
    : n_(m.size()), dl_(m.sub), d_(m.diag), du_(m.sup), du2_(Eigen::VectorXd::Zero(std::max(0, m.size() - 2))), swap_(static_cast<std::size_t>(std::max(0, m.size() - 1)), false) {
  for (int i = 0; i + 1 < n_; ++i) {
    if (std::abs(d_[i]) >= std::abs(dl_[i])) {
      if (d_[i] != 0.0) {
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        singular_ = true;
      }
      if (i + 2 < n_) du2_[i] = 0.0;
    } else {
      swap_[i] = true;
      const double fact = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = fact;
      const double tmp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = tmp - fact * d_[i + 1];
      if (i + 2 < n_) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -fact * du_[i + 1];
      }
    }
  }
  if (d_[n_ - 1] == 0.0) singular_ = true;
}

Eigen::VectorXd TridiagonalSolver::solve(Eigen::VectorXd b) const {
  if (singular_) throw SolverError(SolverError::Code::singular_step, -1, "singular tridiagonal step matrix");
  for (int i = 0; i + 1 < n_; ++i) {
    if (!swap_[i]) {
      b[i + 1] -= dl_[i] * b[i];
    } else {
      const double tmp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tmp - dl_[i] * b[i];
    }
  }
  b[n_ - 1] /= d_[n_ - 1];
  if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
  for (int i = n_ - 3; i >= 0; --i) {
    b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }
  return b;
}

}  // namespace spdr
