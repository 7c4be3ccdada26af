#include "spdr/operators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spdr/errors.hpp"
#include "spdr/rng.hpp"

namespace spdr {

ScalarFunction default_flux() {
  ScalarFunction s;
  s.f = [](double r) { return r * (1.0 + r * r / (1.0 + r * r)); };
  s.df = [](double r) {
    const double q = 1.0 + r * r;
    return 1.0 + (3.0 * r * r + r * r * r * r) / (q * q);
  };
  s.odd = true;
  s.slope_min = 1.0;
  s.slope_max = 2.125;  // attained at r^2 = 3
  s.name = "flux r(1+r^2/(1+r^2))";
  return s;
}

ScalarFunction linear_flux() {
  ScalarFunction s;
  s.f = [](double r) { return r; };
  s.df = [](double) { return 1.0; };
  s.odd = true;
  s.slope_min = 1.0;
  s.slope_max = 1.0;
  s.name = "flux r";
  return s;
}

ScalarFunction default_reaction() {
  ScalarFunction s;
  s.f = [](double r) { return r / (1.0 + std::abs(r)); };
  s.df = [](double r) {
    const double q = 1.0 + std::abs(r);
    return 1.0 / (q * q);
  };
  s.odd = true;
  s.slope_min = 0.0;
  s.slope_max = 1.0;
  s.bound = 1.0;
  s.name = "reaction r/(1+|r|)";
  return s;
}

ScalarFunction zero_reaction() {
  ScalarFunction s;
  s.f = [](double) { return 0.0; };
  s.df = [](double) { return 0.0; };
  s.odd = true;
  s.slope_min = 0.0;
  s.slope_max = 0.0;
  s.bound = 0.0;
  s.name = "reaction 0";
  return s;
}

ScalarFunction porous_nonlinearity() {
  ScalarFunction s;
  s.f = [](double r) { return r + std::atan(r); };
  s.df = [](double r) { return 1.0 + 1.0 / (1.0 + r * r); };
  s.odd = true;
  s.slope_min = 1.0;
  s.slope_max = 2.0;
  s.name = "porous r+atan(r)";
  return s;
}

ScalarFunction saturating_cubic() {
  ScalarFunction s;
  s.f = [](double r) { return r * r * r / (1.0 + r * r); };
  s.df = [](double r) {
    const double q = 1.0 + r * r;
    return (3.0 * r * r + r * r * r * r) / (q * q);
  };
  s.odd = true;
  s.slope_min = 0.0;
  s.slope_max = 1.125;
  s.name = "reaction r^3/(1+r^2)";
  return s;
}

ScalarFunction non_monotone_reaction() {
  ScalarFunction s;
  s.f = [](double r) { return -r; };
  s.df = [](double) { return -1.0; };
  s.odd = true;
  s.slope_min = -1.0;
  s.slope_max = -1.0;
  s.name = "reaction -r (negative control)";
  return s;
}

namespace {

void require_finite(const Eigen::VectorXd& out, double t) {
  if (!out.allFinite()) {
    std::ostringstream msg;
    msg << "operator output not finite at t = " << t << " (flux/reaction overflow)";
    throw SolverError(SolverError::Code::operator_overflow, -1, msg.str());
  }
}

void require_kind(const GelfandTriple& triple, TripleKind kind, const char* who) {
  if (triple.kind() != kind) throw std::invalid_argument(std::string(who) + ": wrong Gelfand triple");
}

}  // namespace

QuasilinearOperator::QuasilinearOperator(std::shared_ptr<const GelfandTriple> triple,
                                         ScalarFunction flux, ScalarFunction reaction,
                                         double nu_coef, double time_amp)
    : MonotoneOperator(std::move(triple)),
      flux_(std::move(flux)),
      reaction_(std::move(reaction)),
      nu_coef_(nu_coef),
      time_amp_(time_amp) {
  require_kind(*triple_, TripleKind::standard, "QuasilinearOperator");
  if (nu_coef_ < 0.0) throw std::invalid_argument("QuasilinearOperator: nu_coef must be >= 0");
  if (time_amp_ < 0.0 || time_amp_ >= 1.0) throw std::invalid_argument("QuasilinearOperator: time_amp in [0,1)");
}

Eigen::VectorXd QuasilinearOperator::apply(double t, const Eigen::VectorXd& u) const {
  const int n = static_cast<int>(u.size());
  const double h = triple_->h();
  const double c = profile(t);
  // edge e joins node e-1 and node e; boundary values are zero
  Eigen::VectorXd fa(n + 1);
  fa[0] = c * flux_.f(u[0] / h);
  for (int e = 1; e < n; ++e) fa[e] = c * flux_.f((u[e] - u[e - 1]) / h);
  fa[n] = c * flux_.f(-u[n - 1] / h);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = -(fa[i + 1] - fa[i]) / h + nu_coef_ * u[i] + c * reaction_.f(u[i]);
  require_finite(out, t);
  return out;
}

Tridiagonal QuasilinearOperator::jacobian(double t, const Eigen::VectorXd& u) const {
  const int n = static_cast<int>(u.size());
  const double h = triple_->h();
  const double w = 1.0 / (h * h);
  const double c = profile(t);
  Eigen::VectorXd s(n + 1);
  s[0] = c * flux_.df(u[0] / h);
  for (int e = 1; e < n; ++e) s[e] = c * flux_.df((u[e] - u[e - 1]) / h);
  s[n] = c * flux_.df(-u[n - 1] / h);
  Tridiagonal m = Tridiagonal::zero(n);
  for (int i = 0; i < n; ++i) m.diag[i] = (s[i] + s[i + 1]) * w + nu_coef_ + c * reaction_.df(u[i]);
  for (int i = 0; i + 1 < n; ++i) {
    m.sup[i] = -s[i + 1] * w;
    m.sub[i] = -s[i + 1] * w;
  }
  return m;
}

GrowthConstants QuasilinearOperator::constants() const {
  const double cmin = 1.0 - time_amp_, cmax = 1.0 + time_amp_;
  const double l1 = triple_->lambda_min();
  GrowthConstants g;
  g.alpha1 = cmin * flux_.slope_min;
  g.alpha2 = nu_coef_;
  g.alpha3 = 0.0;
  g.gamma1 = cmax * flux_.slope_max + nu_coef_ / l1;
  if (std::isfinite(reaction_.bound)) {
    g.gamma2 = cmax * reaction_.bound / std::sqrt(l1);
  } else {
    g.gamma1 += cmax * reaction_.slope_max / l1;
  }
  return g;
}

std::vector<std::pair<std::string, const ScalarFunction*>> QuasilinearOperator::scalar_parts() const {
  return {{"flux", &flux_}, {"reaction", &reaction_}};
}

PorousMediaOperator::PorousMediaOperator(std::shared_ptr<const GelfandTriple> triple,
                                         ScalarFunction psi, double nu_lin, double time_amp)
    : MonotoneOperator(std::move(triple)), psi_(std::move(psi)), nu_lin_(nu_lin), time_amp_(time_amp) {
  require_kind(*triple_, TripleKind::porous, "PorousMediaOperator");
  if (!(nu_lin_ > 0.0)) throw std::invalid_argument("PorousMediaOperator: nu_lin must be positive");
  if (time_amp_ < 0.0 || time_amp_ >= 1.0) throw std::invalid_argument("PorousMediaOperator: time_amp in [0,1)");
}

Eigen::VectorXd PorousMediaOperator::apply(double t, const Eigen::VectorXd& u) const {
  const double c = profile(t);
  Eigen::VectorXd w(u.size());
  for (int i = 0; i < u.size(); ++i) w[i] = c * psi_.f(u[i]) + nu_lin_ * u[i];
  Eigen::VectorXd out = triple_->laplacian().apply(w);
  require_finite(out, t);
  return out;
}

Tridiagonal PorousMediaOperator::jacobian(double t, const Eigen::VectorXd& u) const {
  const int n = static_cast<int>(u.size());
  const double c = profile(t);
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = c * psi_.df(u[i]) + nu_lin_;
  // L * diag(d)
  const Tridiagonal& lap = triple_->laplacian().matrix();
  Tridiagonal m = Tridiagonal::zero(n);
  m.diag = lap.diag.cwiseProduct(d);
  m.sub = lap.sub.cwiseProduct(d.head(n - 1));
  m.sup = lap.sup.cwiseProduct(d.tail(n - 1));
  return m;
}

GrowthConstants PorousMediaOperator::constants() const {
  const double cmin = 1.0 - time_amp_, cmax = 1.0 + time_amp_;
  GrowthConstants g;
  g.alpha1 = cmin * psi_.slope_min + nu_lin_;
  g.gamma1 = cmax * psi_.slope_max + nu_lin_;
  if (std::isfinite(psi_.bound)) g.gamma2 = cmax * psi_.bound;
  return g;
}

double PorousMediaOperator::monotonicity_margin() const {
  // <Au-Av, u-v> >= (c_min s_min + nu_lin) |u-v|_{L^2}^2 >= (...) lambda_1 |u-v|_{H^-1}^2
  return ((1.0 - time_amp_) * psi_.slope_min + nu_lin_) * triple_->lambda_min();
}

std::vector<std::pair<std::string, const ScalarFunction*>> PorousMediaOperator::scalar_parts() const {
  return {{"psi", &psi_}};
}

ReactionDiffusionOperator::ReactionDiffusionOperator(std::shared_ptr<const GelfandTriple> triple,
                                                     ScalarFunction psi, double diffusion,
                                                     double time_amp)
    : MonotoneOperator(std::move(triple)), psi_(std::move(psi)), diffusion_(diffusion), time_amp_(time_amp) {
  require_kind(*triple_, TripleKind::standard, "ReactionDiffusionOperator");
  if (diffusion_ < 0.0) throw std::invalid_argument("ReactionDiffusionOperator: diffusion must be >= 0");
  if (time_amp_ < 0.0 || time_amp_ >= 1.0) throw std::invalid_argument("ReactionDiffusionOperator: time_amp in [0,1)");
}

Eigen::VectorXd ReactionDiffusionOperator::apply(double t, const Eigen::VectorXd& u) const {
  const double c = profile(t);
  Eigen::VectorXd out = diffusion_ * triple_->laplacian().apply(u);
  for (int i = 0; i < u.size(); ++i) out[i] += c * psi_.f(u[i]);
  require_finite(out, t);
  return out;
}

Tridiagonal ReactionDiffusionOperator::jacobian(double t, const Eigen::VectorXd& u) const {
  const double c = profile(t);
  Tridiagonal m = triple_->laplacian().matrix();
  m.scale(diffusion_);
  Eigen::VectorXd d(u.size());
  for (int i = 0; i < u.size(); ++i) d[i] = c * psi_.df(u[i]);
  m.shift_diagonal(d);
  return m;
}

GrowthConstants ReactionDiffusionOperator::constants() const {
  const double cmin = 1.0 - time_amp_, cmax = 1.0 + time_amp_;
  const double l1 = triple_->lambda_min();
  GrowthConstants g;
  g.alpha1 = diffusion_;
  g.alpha2 = cmin * psi_.slope_min;
  g.gamma1 = diffusion_ + cmax * psi_.slope_max / l1;
  if (std::isfinite(psi_.bound)) g.gamma2 = cmax * psi_.bound / std::sqrt(l1);
  return g;
}

double ReactionDiffusionOperator::monotonicity_margin() const {
  return diffusion_ * triple_->lambda_min() + (1.0 - time_amp_) * psi_.slope_min;
}

std::vector<std::pair<std::string, const ScalarFunction*>> ReactionDiffusionOperator::scalar_parts() const {
  return {{"psi", &psi_}};
}

namespace {

class ShiftedOperator final : public MonotoneOperator {
 public:
  ShiftedOperator(std::shared_ptr<const MonotoneOperator> base, double shift, double horizon)
      : MonotoneOperator(base->triple_ptr()), base_(std::move(base)), shift_(shift), horizon_(horizon) {}

  Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const override {
    const double s = std::exp(shift_ * t);
    return base_->apply(t, s * u) / s + shift_ * u;
  }

  Tridiagonal jacobian(double t, const Eigen::VectorXd& u) const override {
    const double s = std::exp(shift_ * t);
    Tridiagonal m = base_->jacobian(t, s * u);
    m.shift_diagonal(shift_);
    return m;
  }

  GrowthConstants constants() const override {
    GrowthConstants g = base_->constants();
    const double l1 = triple_->lambda_min();
    g.alpha2 += shift_;
    g.alpha3 = std::min(g.alpha3, g.alpha3 * std::exp(-2.0 * shift_ * horizon_));
    g.gamma1 += shift_ / l1;
    return g;
  }

  double monotonicity_margin() const override {
    return std::max(0.0, base_->monotonicity_margin()) + shift_;
  }

  bool odd() const override { return base_->odd(); }

  std::vector<std::pair<std::string, const ScalarFunction*>> scalar_parts() const override {
    return base_->scalar_parts();
  }

 private:
  std::shared_ptr<const MonotoneOperator> base_;
  double shift_;
  double horizon_;
};

}  // namespace

std::shared_ptr<MonotoneOperator> shift_operator(std::shared_ptr<const MonotoneOperator> base,
                                                 double nu, double delta, double horizon) {
  if (nu < 0.0 || delta < 0.0) throw std::invalid_argument("shift_operator: nu and delta must be >= 0");
  return std::make_shared<ShiftedOperator>(std::move(base), nu + delta, horizon);
}

HypothesisReport check_hypotheses(const MonotoneOperator& op, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_hypotheses: trials must be >= 1");
  const GelfandTriple& triple = op.triple();
  const int n = triple.n();
  const GrowthConstants gc = op.constants();
  const double margin = op.monotonicity_margin();

  HypothesisReport rep;
  rep.trials = trials;
  NormalSampler rng(seed);
  const double scales[3] = {0.3, 1.0, 3.0};

  auto note = [&rep](const std::string& msg) {
    if (rep.failure.empty()) rep.failure = msg;
  };

  for (int trial = 0; trial < trials; ++trial) {
    const double sc = scales[trial % 3];
    const double t = 2.0 * rng.uniform();
    const Eigen::VectorXd u = sc * rng.vector(n);
    const Eigen::VectorXd v = sc * rng.vector(n);
    const Eigen::VectorXd au = op.apply(t, u);
    const Eigen::VectorXd av = op.apply(t, v);
    const double nu_v = triple.norm_V(u);
    const double nh_u = triple.norm_H(u);
    const Eigen::VectorXd d = u - v;

    const double mono =
        (triple.pairing(au - av, d) - margin * std::pow(triple.norm_H(d), 2)) / (1.0 + triple.norm_V(d) * triple.norm_V(d));
    if (mono < rep.monotonicity_margin) {
      rep.monotonicity_margin = mono;
      if (mono < -1e-9) {
        std::ostringstream msg;
        msg << "monotonicity violated at trial " << trial << " (t=" << t << ", scale=" << sc
            << "): normalized margin " << mono;
        note(msg.str());
      }
    }

    const double coer =
        (triple.pairing(au, u) - gc.alpha1 * nu_v * nu_v - gc.alpha2 * nh_u * nh_u - gc.alpha3) / (1.0 + nu_v * nu_v);
    if (coer < rep.coercivity_margin) {
      rep.coercivity_margin = coer;
      if (coer < -1e-9) {
        std::ostringstream msg;
        msg << "coercivity violated at trial " << trial << ": normalized margin " << coer;
        note(msg.str());
      }
    }

    const double grow = (gc.gamma1 * nu_v + gc.gamma2 - triple.norm_Vdual(au)) / (1.0 + nu_v);
    if (grow < rep.growth_margin) {
      rep.growth_margin = grow;
      if (grow < -1e-9) {
        std::ostringstream msg;
        msg << "growth bound violated at trial " << trial << ": normalized margin " << grow;
        note(msg.str());
      }
    }

    if (op.odd()) {
      const double defect = triple.norm_Vdual(op.apply(t, -u) + au) / (1.0 + nu_v);
      if (defect > rep.oddness_defect) {
        rep.oddness_defect = defect;
        if (defect > 1e-12) {
          std::ostringstream msg;
          msg << "oddness violated at trial " << trial << ": defect " << defect;
          note(msg.str());
        }
      }
    }
  }

  // scalar hypotheses: each part nondecreasing with f(0) = 0
  for (const auto& [name, part] : op.scalar_parts()) {
    if (std::abs(part->f(0.0)) > 0.0) {
      note("scalar part " + name + " has f(0) != 0");
      rep.scalar_margin = std::min(rep.scalar_margin, -std::abs(part->f(0.0)));
    }
    for (int s = 0; s < 256; ++s) {
      const double r1 = 1e3 * (2.0 * rng.uniform() - 1.0);
      const double r2 = 1e3 * (2.0 * rng.uniform() - 1.0);
      const double lo = std::min(r1, r2), hi = std::max(r1, r2);
      if (hi - lo < 1e-12) continue;
      const double slope = (part->f(hi) - part->f(lo)) / (hi - lo);
      if (slope < rep.scalar_margin) {
        rep.scalar_margin = slope;
        if (slope < -1e-12) {
          std::ostringstream msg;
          msg << "scalar part " << name << " decreasing on (" << lo << ", " << hi << "): slope " << slope;
          note(msg.str());
        }
      }
    }
  }

  rep.passed = rep.monotonicity_margin >= -1e-9 && rep.coercivity_margin >= -1e-9 &&
               rep.growth_margin >= -1e-9 && rep.oddness_defect <= 1e-12 && rep.scalar_margin >= -1e-12;
  return rep;
}

}  // namespace spdr
