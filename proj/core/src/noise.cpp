#include "spdr/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "spdr/rng.hpp"

namespace spdr {

double NoiseSpec::mode_amplitude(int j) const { return mu0 * std::pow(static_cast<double>(j), -decay_p); }

void NoiseSpec::validate() const {
  if (j_modes < 1) throw std::invalid_argument("NoiseSpec: j_modes must be >= 1");
  if (mu0 < 0.0) throw std::invalid_argument("NoiseSpec: mu0 must be >= 0");
  if (!(decay_p > 1.5)) throw std::invalid_argument("NoiseSpec: decay_p must exceed 3/2");
}

Eigen::VectorXd mode_function(const Grid& grid, int j) {
  Eigen::VectorXd e(grid.n_interior);
  for (int i = 0; i < grid.n_interior; ++i) e[i] = std::sqrt(2.0) * std::sin(j * M_PI * grid.nodes[i]);
  return e;
}

WienerPath sample_path(const NoiseSpec& spec, const GelfandTriple& triple, int steps, double horizon) {
  spec.validate();
  if (steps < 1) throw std::invalid_argument("sample_path: steps must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_path: horizon must be positive");

  const Grid& grid = triple.grid();
  const int n = grid.n_interior;
  const int cols = steps + 1;

  WienerPath p;
  p.steps = steps;
  p.horizon = horizon;
  p.dt = horizon / steps;
  p.times = Eigen::VectorXd::LinSpaced(cols, 0.0, horizon);

  p.beta = Eigen::MatrixXd::Zero(spec.j_modes, cols);
  NormalSampler rng(spec.seed);
  const double sdt = std::sqrt(p.dt);
  for (int k = 1; k < cols; ++k) {
    for (int j = 0; j < spec.j_modes; ++j) {
      p.beta(j, k) = p.beta(j, k - 1) + sdt * rng();
    }
  }

  Eigen::MatrixXd modes(n, spec.j_modes);
  for (int j = 1; j <= spec.j_modes; ++j) modes.col(j - 1) = spec.mode_amplitude(j) * mode_function(grid, j);
  p.w = modes * p.beta;
  p.exp_w_plus = p.w.array().exp();
  p.exp_w_minus = (-p.w.array()).exp();
  p.mu_field = compute_mu_field(spec, grid);
  p.nu = compute_nu(spec, triple);
  return p;
}

namespace {

// Largest generalized eigenvalue of  M L^{-1} M x = theta L^{-1} x  by power
// iteration on B = L M L^{-1} M (self-adjoint in the L^{-1} inner product);
// theta is the squared H^{-1} operator norm of multiplication by e.
double multiplier_norm_sq_hminus(const Laplacian& lap, const Eigen::VectorXd& e) {
  const int n = static_cast<int>(e.size());
  NormalSampler rng(0xC0FFEEull);
  Eigen::VectorXd x = rng.vector(n);
  x.normalize();
  double theta = 0.0;
  int settled = 0;
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd t1 = e.cwiseProduct(x);
    const Eigen::VectorXd t2 = lap.solve(t1);
    const double num = t1.dot(t2);
    const double den = x.dot(lap.solve(x));
    const double theta_new = num / den;
    if (std::abs(theta_new - theta) <= 1e-14 * std::max(1.0, std::abs(theta_new))) {
      if (++settled >= 3) return theta_new;
    } else {
      settled = 0;
    }
    theta = theta_new;
    x = lap.apply(e.cwiseProduct(t2));
    x.normalize();
  }
  return theta;
}

}  // namespace

double compute_nu(const NoiseSpec& spec, const GelfandTriple& triple) {
  spec.validate();
  double nu = 0.0;
  for (int j = 1; j <= spec.j_modes; ++j) {
    const double mu_j = spec.mode_amplitude(j);
    if (mu_j == 0.0) continue;
    const Eigen::VectorXd e = mode_function(triple.grid(), j);
    const double sup = e.cwiseAbs().maxCoeff();
    double gamma;
    if (triple.kind() == TripleKind::standard) {
      gamma = std::max(1.0, sup);
    } else {
      gamma = std::max(1.0, std::sqrt(std::max(0.0, multiplier_norm_sq_hminus(triple.laplacian(), e))));
    }
    nu += mu_j * mu_j * gamma * gamma * sup * sup;
  }
  return nu;
}

Eigen::VectorXd compute_mu_field(const NoiseSpec& spec, const Grid& grid) {
  spec.validate();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(grid.n_interior);
  for (int j = 1; j <= spec.j_modes; ++j) {
    const double mu_j = spec.mode_amplitude(j);
    mu += 0.5 * mu_j * mu_j * mode_function(grid, j).array().square().matrix();
  }
  return mu;
}

Eigen::VectorXd empirical_multiplier_bound(WienerPath& path, const GelfandTriple& triple,
                                           int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("empirical_multiplier_bound: samples must be >= 1");
  const int n = triple.n();
  const int cols = path.steps + 1;
  NormalSampler rng(seed);
  Eigen::VectorXd z(cols);
  for (int k = 0; k < cols; ++k) {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Eigen::VectorXd y = rng.vector(n);
      const Eigen::VectorXd yp = path.exp_w_plus.col(k).cwiseProduct(y);
      const Eigen::VectorXd ym = path.exp_w_minus.col(k).cwiseProduct(y);
      const double nv = triple.norm_V(y);
      const double nh = triple.norm_H(y);
      worst = std::max({worst, triple.norm_V(yp) / nv, triple.norm_V(ym) / nv,
                        triple.norm_H(yp) / nh, triple.norm_H(ym) / nh});
    }
    z[k] = worst;
  }
  path.z_emp = z;
  return z;
}

WienerPath restrict_path(const WienerPath& path, int factor) {
  if (factor < 1 || path.steps % factor != 0)
    throw std::invalid_argument("restrict_path: factor must divide the step count");
  WienerPath p;
  p.steps = path.steps / factor;
  p.horizon = path.horizon;
  p.dt = path.dt * factor;
  const int cols = p.steps + 1;
  p.times.resize(cols);
  p.beta.resize(path.beta.rows(), cols);
  p.w.resize(path.w.rows(), cols);
  p.exp_w_plus.resize(path.w.rows(), cols);
  p.exp_w_minus.resize(path.w.rows(), cols);
  for (int k = 0; k < cols; ++k) {
    const int src = k * factor;
    p.times[k] = path.times[src];
    p.beta.col(k) = path.beta.col(src);
    p.w.col(k) = path.w.col(src);
    p.exp_w_plus.col(k) = path.exp_w_plus.col(src);
    p.exp_w_minus.col(k) = path.exp_w_minus.col(src);
  }
  p.mu_field = path.mu_field;
  p.nu = path.nu;
  return p;
}

}  // namespace spdr
