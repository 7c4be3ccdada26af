#include "spdr/path_field.hpp"

#include <cmath>

namespace spdr {

PathField constant_in_time(const Eigen::VectorXd& x0, int steps) {
  return x0.replicate(1, steps + 1);
}

PathField weight_exp(const WienerPath& path, const PathField& y) {
  return path.exp_w_plus.cwiseProduct(y);
}

PathField unweight_exp(const WienerPath& path, const PathField& x) {
  return path.exp_w_minus.cwiseProduct(x);
}

namespace {

template <typename NodeNorm>
double accumulate(double dt, int cols, NodeNorm&& node_norm) {
  double acc = 0.0;
  for (int k = 1; k < cols; ++k) {
    const double v = node_norm(k);
    acc += v * v;
  }
  return std::sqrt(dt * acc);
}

}  // namespace

double path_norm_V(const GelfandTriple& triple, double dt, const PathField& x) {
  return accumulate(dt, static_cast<int>(x.cols()), [&](int k) { return triple.norm_V(x.col(k)); });
}

double path_norm_H(const GelfandTriple& triple, double dt, const PathField& x) {
  return accumulate(dt, static_cast<int>(x.cols()), [&](int k) { return triple.norm_H(x.col(k)); });
}

double weighted_path_norm_V(const GelfandTriple& triple, const WienerPath& path, const PathField& y) {
  return accumulate(path.dt, static_cast<int>(y.cols()),
                    [&](int k) { return triple.norm_V(path.exp_w_plus.col(k).cwiseProduct(y.col(k))); });
}

double weighted_path_norm_H(const GelfandTriple& triple, const WienerPath& path, const PathField& y) {
  return accumulate(path.dt, static_cast<int>(y.cols()),
                    [&](int k) { return triple.norm_H(path.exp_w_plus.col(k).cwiseProduct(y.col(k))); });
}

double weighted_path_norm_Vdual(const GelfandTriple& triple, const WienerPath& path, const PathField& y) {
  return accumulate(path.dt, static_cast<int>(y.cols()),
                    [&](int k) { return triple.norm_Vdual(path.exp_w_plus.col(k).cwiseProduct(y.col(k))); });
}

double weighted_path_inner_V(const GelfandTriple& triple, const WienerPath& path, const PathField& a,
                             const PathField& b) {
  double acc = 0.0;
  for (int k = 1; k < a.cols(); ++k) {
    acc += triple.inner_V(path.exp_w_plus.col(k).cwiseProduct(a.col(k)),
                          path.exp_w_plus.col(k).cwiseProduct(b.col(k)));
  }
  return path.dt * acc;
}

}  // namespace spdr
