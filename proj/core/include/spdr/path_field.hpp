#pragma once

#include <Eigen/Core>

#include "spdr/noise.hpp"
#include "spdr/spaces.hpp"

namespace spdr {

// Time-indexed spatial field: column k holds the values at time node k,
// shape n x (K+1).
using PathField = Eigen::MatrixXd;

PathField constant_in_time(const Eigen::VectorXd& x0, int steps);

PathField weight_exp(const WienerPath& path, const PathField& y);    // e^{W} o y
PathField unweight_exp(const WienerPath& path, const PathField& x);  // e^{-W} o x

// L^2(0,T; .) norms by the right-endpoint rectangle rule over nodes 1..K;
// node 0 carries the initial condition and is excluded.
double path_norm_V(const GelfandTriple&, double dt, const PathField& x);
double path_norm_H(const GelfandTriple&, double dt, const PathField& x);

// Norms and inner product of the transformed variables, weighted by e^{W(t)}.
double weighted_path_norm_V(const GelfandTriple&, const WienerPath&, const PathField& y);
double weighted_path_norm_H(const GelfandTriple&, const WienerPath&, const PathField& y);
double weighted_path_norm_Vdual(const GelfandTriple&, const WienerPath&, const PathField& y);
double weighted_path_inner_V(const GelfandTriple&, const WienerPath&, const PathField& a,
                             const PathField& b);

}  // namespace spdr
