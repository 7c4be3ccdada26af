#pragma once

#include <Eigen/Core>
#include <vector>

namespace spdr {

struct Tridiagonal {
  Eigen::VectorXd sub;   // size n-1
  Eigen::VectorXd diag;  // size n
  Eigen::VectorXd sup;   // size n-1

  static Tridiagonal zero(int n);

  int size() const { return static_cast<int>(diag.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  void scale(double a);
  void add_scaled(double a, const Tridiagonal& m);
  void shift_diagonal(double c);
  void shift_diagonal(const Eigen::VectorXd& d);
  // diag(left) * M * diag(right)
  Tridiagonal sandwich(const Eigen::VectorXd& left, const Eigen::VectorXd& right) const;
};

// LU with partial pivoting (gttrf/gttrs scheme); the pivoted U picks up a
// second superdiagonal.
class TridiagonalSolver {
 public:
  explicit TridiagonalSolver(const Tridiagonal& m);

  Eigen::VectorXd solve(Eigen::VectorXd b) const;
  bool singular() const { return singular_; }

 private:
  int n_;
  Eigen::VectorXd dl_, d_, du_, du2_;
  std::vector<bool> swap_;
  bool singular_ = false;
};

}  // namespace spdr
