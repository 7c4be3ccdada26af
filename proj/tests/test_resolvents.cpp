#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "spdr/resolvents.hpp"
#include "spdr/rng.hpp"

using namespace spdr;

namespace {

struct Setup {
  std::shared_ptr<const GelfandTriple> triple;
  WienerPath path;
  std::shared_ptr<MonotoneOperator> op;
};

Setup make_setup(TripleKind kind, double mu0, int n = 20, int steps = 12, double horizon = 0.6,
                 std::uint64_t seed = 31) {
  Setup s;
  s.triple = std::make_shared<GelfandTriple>(build_grid(n), kind);
  NoiseSpec spec;
  spec.j_modes = 4;
  spec.mu0 = mu0;
  spec.seed = seed;
  s.path = sample_path(spec, *s.triple, steps, horizon);
  if (kind == TripleKind::standard) {
    s.op = std::make_shared<QuasilinearOperator>(s.triple, default_flux(), default_reaction(),
                                                 s.path.nu + 0.05);
  } else {
    s.op = std::make_shared<PorousMediaOperator>(s.triple, porous_nonlinearity(), 0.5);
  }
  return s;
}

PathField random_field(int n, int steps, std::uint64_t seed, double scale = 1.0) {
  NormalSampler rng(seed);
  PathField f(n, steps + 1);
  for (int k = 0; k <= steps; ++k) f.col(k) = scale * rng.vector(n);
  return f;
}

// y + lambda A* y with A* y = e^{-W} J^{-1}(A(e^W y) - nu e^W y)
PathField apply_i_plus_lambda_a_star(const MonotoneOperator& op, const WienerPath& path,
                                     double lambda, const PathField& y) {
  const GelfandTriple& t = op.triple();
  PathField out(y.rows(), y.cols());
  for (int k = 0; k < y.cols(); ++k) {
    const Eigen::VectorXd x = path.exp_w_plus.col(k).cwiseProduct(y.col(k));
    const Eigen::VectorXd astar = path.exp_w_minus.col(k).cwiseProduct(
        t.duality_solve(op.apply(path.times[k], x) - path.nu * x));
    out.col(k) = y.col(k) + lambda * astar;
  }
  return out;
}

}  // namespace

TEST_CASE("stationary resolvent: linear closed form") {
  // A = L and no noise: (1+lambda) L X = L v, so y = v/(1+lambda) per node
  auto triple = std::make_shared<GelfandTriple>(build_grid(16), TripleKind::standard);
  NoiseSpec spec;
  spec.mu0 = 0.0;
  const WienerPath path = sample_path(spec, *triple, 8, 0.4);
  const QuasilinearOperator op(triple, linear_flux(), zero_reaction(), 0.0);
  const double lambda = 0.7;
  const PathField v = random_field(16, 8, 41);
  const ResolventResult r = stationary_resolvent(op, path, lambda, v, SolverOpts{});
  CHECK((r.field - v / (1.0 + lambda)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(r.max_residual <= 1e-10);
}

TEST_CASE("stationary resolvent: zero input gives zero") {
  const Setup s = make_setup(TripleKind::standard, 0.3);
  const PathField v = PathField::Zero(20, 13);
  const ResolventResult r = stationary_resolvent(*s.op, s.path, 0.5, v, SolverOpts{});
  CHECK(r.field.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("stationary resolvent: re-substitution residual per node") {
  for (TripleKind kind : {TripleKind::standard, TripleKind::porous}) {
    CAPTURE(static_cast<int>(kind));
    const Setup s = make_setup(kind, 0.25);
    const GelfandTriple& t = *s.triple;
    const double lambda = 0.5;
    const PathField v = random_field(20, 12, 43);
    const ResolventResult r = stationary_resolvent(*s.op, s.path, lambda, v, SolverOpts{});
    for (int k = 0; k <= 12; ++k) {
      const Eigen::VectorXd x = s.path.exp_w_plus.col(k).cwiseProduct(r.field.col(k));
      const Eigen::VectorXd resid = t.duality_map(x) +
                                    lambda * (s.op->apply(s.path.times[k], x) - s.path.nu * x) -
                                    t.duality_map(s.path.exp_w_plus.col(k).cwiseProduct(v.col(k)));
      CHECK(t.norm_Vdual(resid) <= 1e-10);
    }
  }
}

TEST_CASE("stationary resolvent: firm nonexpansiveness in the weighted V inner product") {
  const Setup s = make_setup(TripleKind::standard, 0.2);
  const double lambda = 0.5;
  for (int trial = 0; trial < 5; ++trial) {
    const PathField v1 = random_field(20, 12, 100 + trial);
    const PathField v2 = random_field(20, 12, 200 + trial);
    const PathField r1 = stationary_resolvent(*s.op, s.path, lambda, v1, SolverOpts{}).field;
    const PathField r2 = stationary_resolvent(*s.op, s.path, lambda, v2, SolverOpts{}).field;
    const PathField dr = r1 - r2;
    const double lhs = weighted_path_inner_V(*s.triple, s.path, dr, v1 - v2);
    const double rhs = weighted_path_inner_V(*s.triple, s.path, dr, dr);
    CHECK(lhs >= rhs - 1e-8);
  }
}

TEST_CASE("stationary resolvent: resolvent identity") {
  const Setup s = make_setup(TripleKind::standard, 0.3);
  const double lambda = 0.4;
  const PathField v = random_field(20, 12, 47);
  const PathField y = stationary_resolvent(*s.op, s.path, lambda, v, SolverOpts{}).field;
  const PathField back = apply_i_plus_lambda_a_star(*s.op, s.path, lambda, y);
  CHECK(weighted_path_norm_Vdual(*s.triple, s.path, back - v) <= 10 * SolverOpts{}.newton_tol);
}

TEST_CASE("stationary resolvent: iteration cap reports divergence") {
  const Setup s = make_setup(TripleKind::standard, 0.3);
  SolverOpts opts;
  opts.max_newton = 0;
  const PathField v = random_field(20, 12, 53);
  CHECK_THROWS_AS(stationary_resolvent(*s.op, s.path, 0.5, v, opts), SolverError);
}

TEST_CASE("evolution resolvent: zero data stays zero") {
  const Setup s = make_setup(TripleKind::standard, 0.3);
  const ResolventResult r = evolution_resolvent(*s.triple, s.path, 0.5, Eigen::VectorXd::Zero(20),
                                                PathField::Zero(20, 13));
  CHECK(r.field.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evolution resolvent: eigenmode recurrence without noise") {
  auto triple = std::make_shared<GelfandTriple>(build_grid(16), TripleKind::standard);
  NoiseSpec spec;
  spec.mu0 = 0.0;
  const WienerPath path = sample_path(spec, *triple, 10, 0.5);
  const double lambda = 0.8;
  const Eigen::VectorXd x0 = triple->laplacian().eigenvector(1);
  const ResolventResult r =
      evolution_resolvent(*triple, path, lambda, x0, PathField::Zero(16, 11));
  // (lambda_1 + lambda/dt) z_k = (lambda/dt) z_{k-1} on the first eigenmode
  const double tau = lambda / path.dt;
  const double rho = tau / (triple->lambda_min() + tau);
  double factor = 1.0;
  for (int k = 1; k <= 10; ++k) {
    factor *= rho;
    CHECK((r.field.col(k) - factor * x0).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("evolution resolvent: re-substitution residual per step") {
  for (TripleKind kind : {TripleKind::standard, TripleKind::porous}) {
    CAPTURE(static_cast<int>(kind));
    const Setup s = make_setup(kind, 0.25);
    const PathField g = random_field(20, 12, 59);
    NormalSampler rng(61);
    const ResolventResult r = evolution_resolvent(*s.triple, s.path, 0.5, rng.vector(20), g);
    CHECK(r.max_residual <= 1e-12);
  }
}

TEST_CASE("evolution resolvent is affine in the input") {
  const Setup s = make_setup(TripleKind::standard, 0.3);
  NormalSampler rng(67);
  const Eigen::VectorXd x0 = rng.vector(20);
  const PathField g1 = random_field(20, 12, 71);
  const PathField g2 = random_field(20, 12, 73);
  const double a = 0.3;
  const PathField z1 = evolution_resolvent(*s.triple, s.path, 0.5, x0, g1).field;
  const PathField z2 = evolution_resolvent(*s.triple, s.path, 0.5, x0, g2).field;
  const PathField mix = evolution_resolvent(*s.triple, s.path, 0.5, x0, a * g1 + (1 - a) * g2).field;
  CHECK((mix - (a * z1 + (1 - a) * z2)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("evolution resolvent: monotone H-norm decay for zero input") {
  auto triple = std::make_shared<GelfandTriple>(build_grid(16), TripleKind::standard);
  NoiseSpec spec;
  spec.mu0 = 0.0;
  const WienerPath path = sample_path(spec, *triple, 20, 1.0);
  NormalSampler rng(79);
  const ResolventResult r =
      evolution_resolvent(*triple, path, 0.5, rng.vector(16), PathField::Zero(16, 21));
  double prev = triple->norm_H(r.field.col(0));
  for (int k = 1; k <= 20; ++k) {
    const double cur = triple->norm_H(r.field.col(k));
    CHECK(cur <= prev * (1.0 + 1e-14));
    prev = cur;
  }
}

TEST_CASE("H-geometry stationary resolvent") {
  auto triple = std::make_shared<GelfandTriple>(build_grid(16), TripleKind::standard);
  NoiseSpec spec;
  spec.j_modes = 4;
  spec.mu0 = 0.5;
  spec.seed = 83;
  const WienerPath path = sample_path(spec, *triple, 10, 0.5);
  REQUIRE(path.nu > 0.0);

  SUBCASE("pure scaling when the operator vanishes") {
    const ReactionDiffusionOperator op(triple, zero_reaction(), 0.0);
    const double lambda = 0.25;
    REQUIRE(lambda * path.nu < 1.0);
    const PathField v = random_field(16, 10, 89);
    const ResolventResult r = stationary_resolvent_h(op, path, lambda, v, SolverOpts{});
    CHECK((r.field - v / (1.0 - lambda * path.nu)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(stationary_resolvent_h(op, path, lambda, PathField::Zero(16, 11), SolverOpts{})
              .field.cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
  SUBCASE("multi-start uniqueness and residual") {
    const ReactionDiffusionOperator op(triple, saturating_cubic());
    const double lambda = 0.25;
    const PathField v = random_field(16, 10, 97);
    const ResolventResult base = stationary_resolvent_h(op, path, lambda, v, SolverOpts{});
    CHECK(base.max_residual <= 1e-10);
    for (int trial = 0; trial < 3; ++trial) {
      const PathField init = random_field(16, 10, 300 + trial, 2.0);
      const ResolventResult r = stationary_resolvent_h(op, path, lambda, v, SolverOpts{}, &init);
      CHECK((r.field - base.field).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
  SUBCASE("lambda nu >= 1 is rejected") {
    NoiseSpec big = spec;
    big.mu0 = 1.0;
    const WienerPath loud = sample_path(big, *triple, 10, 0.5);
    REQUIRE(loud.nu * 0.5 >= 1.0);
    const ReactionDiffusionOperator op(triple, saturating_cubic());
    const PathField v = random_field(16, 10, 101);
    CHECK_THROWS_AS(stationary_resolvent_h(op, loud, 0.5, v, SolverOpts{}), SolverError);
  }
}

TEST_CASE("H-geometry evolution resolvent") {
  auto triple = std::make_shared<GelfandTriple>(build_grid(16), TripleKind::standard);
  SUBCASE("scalar decay without noise") {
    NoiseSpec spec;
    spec.mu0 = 0.0;
    const WienerPath path = sample_path(spec, *triple, 10, 0.5);
    NormalSampler rng(103);
    const Eigen::VectorXd x0 = rng.vector(16);
    const double lambda = 0.5;
    const ResolventResult r = evolution_resolvent_h(path, lambda, x0, PathField::Zero(16, 11));
    // (1 + lambda/dt) z_k = (lambda/dt) z_{k-1}
    const double tau = lambda / path.dt;
    const double rho = tau / (1.0 + tau);
    double factor = 1.0;
    for (int k = 1; k <= 10; ++k) {
      factor *= rho;
      CHECK((r.field.col(k) - factor * x0).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK(evolution_resolvent_h(path, lambda, Eigen::VectorXd::Zero(16), PathField::Zero(16, 11))
              .field.cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SUBCASE("per-node residual on random input") {
    NoiseSpec spec;
    spec.j_modes = 4;
    spec.mu0 = 0.4;
    spec.seed = 107;
    const WienerPath path = sample_path(spec, *triple, 10, 0.5);
    NormalSampler rng(109);
    const ResolventResult r = evolution_resolvent_h(path, 0.5, rng.vector(16), random_field(16, 10, 113));
    CHECK(r.max_residual <= 1e-12);
  }
}
