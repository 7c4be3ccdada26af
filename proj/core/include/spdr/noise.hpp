#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "spdr/spaces.hpp"

namespace spdr {

// Truncated multiplicative noise
//   W(t,xi) = sum_{j<=J} mu_j e_j(xi) beta_j(t),   e_j = sqrt(2) sin(j pi xi),
// with mu_j = mu0 j^{-decay_p}. decay_p > 3/2 keeps the gradient series
// sum mu_j^2 |e_j'|_inf^2 of the untruncated expansion finite.
struct NoiseSpec {
  int j_modes = 8;
  double mu0 = 0.2;
  double decay_p = 2.0;
  std::uint64_t seed = 1;

  double mode_amplitude(int j) const;  // mu_j, 1-based
  void validate() const;
};

Eigen::VectorXd mode_function(const Grid& grid, int j);  // e_j at the nodes

// One sampled path with everything the pathwise solvers need precomputed.
struct WienerPath {
  int steps = 0;      // K
  double horizon = 0.0;
  double dt = 0.0;
  Eigen::VectorXd times;        // K+1
  Eigen::MatrixXd beta;         // j_modes x (K+1), beta_j(0) = 0
  Eigen::MatrixXd w;            // n x (K+1), column k = W(t_k, .)
  Eigen::MatrixXd exp_w_plus;   // e^{+W}
  Eigen::MatrixXd exp_w_minus;  // e^{-W}
  Eigen::VectorXd mu_field;     // Ito correction (1/2) sum mu_j^2 e_j^2
  double nu = 0.0;              // multiplier constant sum mu_j^2 gamma_j^2 |e_j|_inf^2
  Eigen::VectorXd z_emp;        // filled by empirical_multiplier_bound
};

WienerPath sample_path(const NoiseSpec& spec, const GelfandTriple& triple, int steps, double horizon);

// gamma_j is the norm of y -> e_j y on the discrete H, floored at 1.
double compute_nu(const NoiseSpec& spec, const GelfandTriple& triple);

Eigen::VectorXd compute_mu_field(const NoiseSpec& spec, const Grid& grid);

// Per-node empirical bound on the e^{+-W(t_k)} multiplier norms in V and H,
// maximized over `samples` random fields. Also stored in path.z_emp.
Eigen::VectorXd empirical_multiplier_bound(WienerPath& path, const GelfandTriple& triple,
                                           int samples, std::uint64_t seed);

// Keep every factor-th time node (consistent coarsening of one Brownian path).
WienerPath restrict_path(const WienerPath& path, int factor);

}  // namespace spdr
