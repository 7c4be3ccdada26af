#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "spdr/spaces.hpp"
#include "spdr/tridiagonal.hpp"

namespace spdr {

// Scalar nonlinearity with its slope and the envelope data used by the
// hypothesis checks.
struct ScalarFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  bool odd = false;
  double slope_min = 0.0;
  double slope_max = 0.0;
  double bound = std::numeric_limits<double>::infinity();  // sup |f| if finite
  std::string name;
};

ScalarFunction default_flux();            // r (1 + r^2/(1+r^2)), slopes in [1, 2.125]
ScalarFunction linear_flux();             // r
ScalarFunction default_reaction();        // r/(1+|r|), bounded by 1
ScalarFunction zero_reaction();
ScalarFunction porous_nonlinearity();     // r + atan r
ScalarFunction saturating_cubic();        // r^3/(1+r^2)
ScalarFunction non_monotone_reaction();   // -r, negative control

struct GrowthConstants {
  double alpha1 = 0.0;  // coercivity <Au,u> >= a1 |u|_V^2 + a2 |u|_H^2 + a3
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double gamma1 = 0.0;  // growth |Au|_V' <= g1 |u|_V + g2
  double gamma2 = 0.0;
};

// Nonlinear monotone operator A(t): V -> V'. apply() returns the nodal
// coordinates of the V' element; jacobian() its derivative, tridiagonal for
// all built-ins.
class MonotoneOperator {
 public:
  explicit MonotoneOperator(std::shared_ptr<const GelfandTriple> triple) : triple_(std::move(triple)) {}
  virtual ~MonotoneOperator() = default;

  virtual Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const = 0;
  virtual Tridiagonal jacobian(double t, const Eigen::VectorXd& u) const = 0;
  virtual GrowthConstants constants() const = 0;
  // declared strong-monotonicity margin: <Au - Av, u - v> >= margin |u-v|_H^2
  virtual double monotonicity_margin() const = 0;
  virtual bool odd() const = 0;
  virtual std::vector<std::pair<std::string, const ScalarFunction*>> scalar_parts() const { return {}; }

  const GelfandTriple& triple() const { return *triple_; }
  std::shared_ptr<const GelfandTriple> triple_ptr() const { return triple_; }

 protected:
  std::shared_ptr<const GelfandTriple> triple_;
};

// Quasilinear reaction-diffusion operator on the standard triple:
//   A(t)u = -d/dxi [ c(t) a(du/dxi) ] + nu_coef u + c(t) psi(u),
// discretized as the gradient of the edge energy sum_e h Phi(D+ u) with
// Phi' = a, so monotonicity is inherited from the scalar parts.
class QuasilinearOperator final : public MonotoneOperator {
 public:
  QuasilinearOperator(std::shared_ptr<const GelfandTriple> triple, ScalarFunction flux,
                      ScalarFunction reaction, double nu_coef, double time_amp = 0.0);

  Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const override;
  Tridiagonal jacobian(double t, const Eigen::VectorXd& u) const override;
  GrowthConstants constants() const override;
  double monotonicity_margin() const override { return nu_coef_; }
  bool odd() const override { return flux_.odd && reaction_.odd; }
  std::vector<std::pair<std::string, const ScalarFunction*>> scalar_parts() const override;

  double nu_coef() const { return nu_coef_; }

 private:
  double profile(double t) const { return 1.0 + time_amp_ * std::sin(t); }
  ScalarFunction flux_, reaction_;
  double nu_coef_;
  double time_amp_;
};

// Porous-media operator on the H^{-1} triple:
//   A(t)u = L ( c(t) psi(u) + nu_lin u ),
// i.e. the weak form <A(t)y, v> = h sum (c psi(y_i) + nu_lin y_i) v_i.
class PorousMediaOperator final : public MonotoneOperator {
 public:
  PorousMediaOperator(std::shared_ptr<const GelfandTriple> triple, ScalarFunction psi,
                      double nu_lin, double time_amp = 0.0);

  Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const override;
  Tridiagonal jacobian(double t, const Eigen::VectorXd& u) const override;
  GrowthConstants constants() const override;
  double monotonicity_margin() const override;
  bool odd() const override { return psi_.odd; }
  std::vector<std::pair<std::string, const ScalarFunction*>> scalar_parts() const override;

 private:
  double profile(double t) const { return 1.0 + time_amp_ * std::sin(t); }
  ScalarFunction psi_;
  double nu_lin_;
  double time_amp_;
};

// Reaction-diffusion operator A_H u = diffusion L u + c(t) Psi(u). Lives on
// the standard triple where nodal V'-coordinates and H-coordinates agree, so
// the same object serves the V-geometry scheme and the H-geometry scheme.
class ReactionDiffusionOperator final : public MonotoneOperator {
 public:
  ReactionDiffusionOperator(std::shared_ptr<const GelfandTriple> triple, ScalarFunction psi,
                            double diffusion = 1.0, double time_amp = 0.0);

  Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const override;
  Tridiagonal jacobian(double t, const Eigen::VectorXd& u) const override;
  GrowthConstants constants() const override;
  double monotonicity_margin() const override;
  bool odd() const override { return psi_.odd; }
  std::vector<std::pair<std::string, const ScalarFunction*>> scalar_parts() const override;

 private:
  double profile(double t) const { return 1.0 + time_amp_ * std::sin(t); }
  ScalarFunction psi_;
  double diffusion_;
  double time_amp_;
};

// Strong-monotonicity shift: the substitution X -> e^{-(nu+delta)t} X turns
// A into  e^{-ct} A(t)(e^{ct} .) + c I  with c = nu + delta, which gains the
// margin c on top of plain monotonicity.
std::shared_ptr<MonotoneOperator> shift_operator(std::shared_ptr<const MonotoneOperator> base,
                                                 double nu, double delta, double horizon);

struct HypothesisReport {
  int trials = 0;
  // normalized worst-case margins; nonnegative means the inequality held
  double monotonicity_margin = std::numeric_limits<double>::infinity();
  double coercivity_margin = std::numeric_limits<double>::infinity();
  double growth_margin = std::numeric_limits<double>::infinity();
  double oddness_defect = 0.0;
  double scalar_margin = std::numeric_limits<double>::infinity();
  bool passed = false;
  std::string failure;  // witness of the first violation, empty if none
};

HypothesisReport check_hypotheses(const MonotoneOperator& op, int trials, std::uint64_t seed);

}  // namespace spdr
