#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "spdr/reference.hpp"
#include "spdr/rng.hpp"
#include "spdr/splitting.hpp"

using namespace spdr;

namespace {

struct Setup {
  std::shared_ptr<const GelfandTriple> triple;
  WienerPath path;
  std::shared_ptr<MonotoneOperator> op;
  Eigen::VectorXd x0;
};

Setup quasilinear_setup(double mu0, int n = 16, int steps = 20, double horizon = 0.4,
                        std::uint64_t seed = 11, bool linear = false) {
  Setup s;
  s.triple = std::make_shared<GelfandTriple>(build_grid(n), TripleKind::standard);
  NoiseSpec spec;
  spec.j_modes = 4;
  spec.mu0 = mu0;
  spec.seed = seed;
  s.path = sample_path(spec, *s.triple, steps, horizon);
  if (linear) {
    s.op = std::make_shared<QuasilinearOperator>(s.triple, linear_flux(), zero_reaction(), 0.0);
  } else {
    s.op = std::make_shared<QuasilinearOperator>(s.triple, default_flux(), default_reaction(),
                                                 s.path.nu + 0.05);
  }
  s.x0 = s.triple->laplacian().eigenvector(1);
  return s;
}

PathField random_field(int n, int steps, std::uint64_t seed) {
  NormalSampler rng(seed);
  PathField f(n, steps + 1);
  for (int k = 0; k <= steps; ++k) f.col(k) = rng.vector(n);
  return f;
}

}  // namespace

TEST_CASE("dr_step: algebraic identity v_{n+1} - v_n = z_{n+1} - y_n") {
  Setup s = quasilinear_setup(0.25);
  DrState state = dr_init(constant_in_time(s.x0, s.path.steps));
  for (int it = 0; it < 4; ++it) {
    const PathField v_prev = state.v;
    dr_step(state, *s.op, s.path, s.x0, 0.5, SolverOpts{});
    CHECK(((state.v - v_prev) - (state.z - state.y)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("dr: zero data is an equilibrium") {
  Setup s = quasilinear_setup(0.0, 12, 10, 0.3, 13, /*linear=*/true);
  s.x0.setZero();
  DrState state = dr_init(PathField::Zero(12, 11));
  for (int it = 0; it < 3; ++it) {
    dr_step(state, *s.op, s.path, s.x0, 0.5, SolverOpts{});
    CHECK(state.v.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(state.y.cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("dr_solve: restarting from the fixed point stops after one step") {
  Setup s = quasilinear_setup(0.2);
  DrOpts opts;
  opts.lambda = 0.5;
  opts.stop_tol = 1e-10;
  opts.max_iterations = 500;
  const SplitRunResult first = dr_solve(*s.op, s.path, s.x0, opts);
  REQUIRE(first.converged);
  const SplitRunResult again = dr_solve(*s.op, s.path, s.x0, opts, &first.v);
  CHECK(again.converged);
  CHECK(again.iterations == 1);
  CHECK(again.history.front().dv <= 10 * opts.stop_tol);
}

TEST_CASE("dr iterates match the dense affine oracle") {
  Setup s = quasilinear_setup(0.2, 8, 16, 0.4, 17, /*linear=*/true);
  const double lambda = 0.6;
  const oracle::DenseAffineDr dense(*s.triple, s.path, lambda, s.x0, 1.0, 0.0);

  const PathField v0 = random_field(8, 16, 19);
  DrState state = dr_init(v0);
  Eigen::VectorXd u = dense.stack(v0);
  for (int it = 0; it < 10; ++it) {
    const PathField v_prev = state.v;
    dr_step(state, *s.op, s.path, s.x0, lambda, SolverOpts{});
    u = dense.step(u);
    CHECK((dense.stack(state.v) - u).cwiseAbs().maxCoeff() <= 1e-9);
    // y_n = resolvent(v_n), checked against the dense per-node resolvent
    for (int k = 1; k <= 16; ++k) {
      CHECK((state.y.col(k) - dense.resolvent[k] * v_prev.col(k)).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("dr_solve agrees with the reference solver (linear, no noise)") {
  Setup s = quasilinear_setup(0.0, 16, 20, 0.2, 23, /*linear=*/true);
  DrOpts opts;
  opts.lambda = 0.5;
  opts.stop_tol = 1e-9;
  opts.max_iterations = 300;
  const ReferenceSolution ref = reference_solve(*s.op, s.path, s.x0, opts.solver);
  const SplitRunResult run = dr_solve(*s.op, s.path, s.x0, opts, nullptr, &ref.x);
  REQUIRE(run.converged);
  CHECK(path_norm_V(*s.triple, s.path.dt, run.x - ref.x) <= 1e-6);
}

TEST_CASE("dr_solve: successive differences decay monotonically after burn-in (odd operator)") {
  Setup s = quasilinear_setup(0.2);
  DrOpts opts;
  opts.lambda = 0.5;
  opts.stop_tol = 1e-9;
  opts.max_iterations = 400;
  const ReferenceSolution ref = reference_solve(*s.op, s.path, s.x0, opts.solver);
  const SplitRunResult run = dr_solve(*s.op, s.path, s.x0, opts, nullptr, &ref.x);
  REQUIRE(run.converged);
  for (std::size_t i = 5; i + 1 < run.history.size(); ++i) {
    CHECK(run.history[i + 1].err_V <= run.history[i].err_V + 1e-15);
  }
}

TEST_CASE("solution map on X-iterates") {
  SUBCASE("zero data maps to zero") {
    Setup s = quasilinear_setup(0.0, 12, 10, 0.3, 29, /*linear=*/true);
    s.x0.setZero();
    const PathField x = x_fixed_point_map(*s.op, s.path, s.x0, 0.5, PathField::Zero(12, 11),
                                          SolverOpts{});
    CHECK(x.cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("iterating the map reproduces the dr X-iterates") {
    Setup s = quasilinear_setup(0.25, 10, 8, 0.4, 31);
    const double lambda = 0.5;
    const PathField v0 = random_field(10, 8, 37);
    DrState state = dr_init(v0);
    // matched start: X_0 = e^W (I + lambda A*)^{-1} v_0; after n+1 dr_steps
    // state.y holds y_n, which corresponds to the n-th map iterate
    PathField x = weight_exp(s.path, stationary_resolvent(*s.op, s.path, lambda, v0, SolverOpts{}).field);
    for (int it = 0; it < 5; ++it) {
      dr_step(state, *s.op, s.path, s.x0, lambda, SolverOpts{});
      CHECK((x - weight_exp(s.path, state.y)).cwiseAbs().maxCoeff() <= 1e-8);
      x = x_fixed_point_map(*s.op, s.path, s.x0, lambda, x, SolverOpts{});
    }
  }
  SUBCASE("the converged solution is a fixed point") {
    Setup s = quasilinear_setup(0.2);
    DrOpts opts;
    opts.lambda = 0.5;
    opts.stop_tol = 1e-9;
    opts.max_iterations = 400;
    const SplitRunResult run = dr_solve(*s.op, s.path, s.x0, opts);
    REQUIRE(run.converged);
    const PathField gx = x_fixed_point_map(*s.op, s.path, s.x0, opts.lambda, run.x, opts.solver);
    CHECK(path_norm_V(*s.triple, s.path.dt, gx - run.x) <= 10 * opts.stop_tol);
  }
}

TEST_CASE("dr map is nonexpansive between two runs") {
  Setup s = quasilinear_setup(0.2);
  const double lambda = 0.5;
  const PathField v0a = random_field(16, 20, 41);
  const PathField v0b = random_field(16, 20, 43);
  DrState a = dr_init(v0a);
  DrState b = dr_init(v0b);
  double prev = weighted_path_norm_V(*s.triple, s.path, v0a - v0b);
  for (int it = 0; it < 5; ++it) {
    dr_step(a, *s.op, s.path, s.x0, lambda, SolverOpts{});
    dr_step(b, *s.op, s.path, s.x0, lambda, SolverOpts{});
    const double cur = weighted_path_norm_V(*s.triple, s.path, a.v - b.v);
    CHECK(cur <= prev + 5 * SolverOpts{}.newton_tol);
    prev = cur;
  }
}

TEST_CASE("dr_solve: the limit does not depend on lambda") {
  Setup s = quasilinear_setup(0.15, 16, 20, 0.3, 47);
  DrOpts opts;
  opts.stop_tol = 1e-9;
  opts.max_iterations = 3000;
  std::vector<PathField> sols;
  for (double lambda : {0.25, 0.5, 1.0}) {
    opts.lambda = lambda;
    const SplitRunResult run = dr_solve(*s.op, s.path, s.x0, opts);
    REQUIRE(run.converged);
    sols.push_back(run.x);
  }
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j)
      CHECK(path_norm_V(*s.triple, s.path.dt, sols[i] - sols[j]) <= 10 * opts.stop_tol);
}

TEST_CASE("dr_solve: the limit does not depend on the start") {
  Setup s = quasilinear_setup(0.2);
  DrOpts opts;
  opts.lambda = 0.5;
  opts.stop_tol = 1e-9;
  opts.max_iterations = 3000;
  const PathField v0a = random_field(16, 20, 53);
  const PathField v0b = 2.0 * random_field(16, 20, 59);
  const SplitRunResult a = dr_solve(*s.op, s.path, s.x0, opts, &v0a);
  const SplitRunResult b = dr_solve(*s.op, s.path, s.x0, opts, &v0b);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(path_norm_V(*s.triple, s.path.dt, a.x - b.x) <= 10 * opts.stop_tol);
}

TEST_CASE("dr_solve: iteration cap returns the history") {
  Setup s = quasilinear_setup(0.2);
  DrOpts opts;
  opts.lambda = 0.5;
  opts.stop_tol = 1e-14;
  opts.max_iterations = 3;
  const SplitRunResult run = dr_solve(*s.op, s.path, s.x0, opts);
  CHECK(!run.converged);
  CHECK(run.iterations == 3);
  CHECK(run.history.size() == 3);
}

TEST_CASE("converged dr solution passes the residual certificate") {
  for (TripleKind kind : {TripleKind::standard, TripleKind::porous}) {
    CAPTURE(static_cast<int>(kind));
    auto triple = std::make_shared<GelfandTriple>(build_grid(16), kind);
    NoiseSpec spec;
    spec.j_modes = 4;
    spec.mu0 = 0.2;
    spec.seed = 61;
    const WienerPath path = sample_path(spec, *triple, 16, 0.3);
    std::shared_ptr<MonotoneOperator> op;
    if (kind == TripleKind::standard) {
      op = std::make_shared<QuasilinearOperator>(triple, default_flux(), default_reaction(),
                                                 path.nu + 0.05);
    } else {
      op = std::make_shared<PorousMediaOperator>(triple, porous_nonlinearity(), 0.5);
    }
    const Eigen::VectorXd x0 = triple->laplacian().eigenvector(1);
    DrOpts opts;
    opts.lambda = 0.5;
    opts.stop_tol = 1e-9;
    opts.max_iterations = 2000;
    const SplitRunResult run = dr_solve(*op, path, x0, opts);
    REQUIRE(run.converged);
    CHECK(residual_certificate(*op, path, run.x).maxCoeff() <= 100 * opts.stop_tol);
  }
}

TEST_CASE("H-geometry scheme") {
  auto triple = std::make_shared<GelfandTriple>(build_grid(16), TripleKind::standard);
  NoiseSpec spec;
  spec.j_modes = 4;
  spec.mu0 = 0.2;
  spec.seed = 67;
  const WienerPath path = sample_path(spec, *triple, 20, 0.4);
  const Eigen::VectorXd x0 = triple->laplacian().eigenvector(1);

  SUBCASE("identity z~_{n+1} = v_{n+1} - v_n + u_n") {
    const ReactionDiffusionOperator op(triple, saturating_cubic());
    const double lambda = 0.25;
    PathField v = random_field(16, 20, 71);
    for (int it = 0; it < 3; ++it) {
      const PathField u = stationary_resolvent_h(op, path, lambda, v, SolverOpts{}).field;
      const PathField z = evolution_resolvent_h(path, lambda, x0, 2.0 * u - v).field;
      const PathField v_next = z + v - u;
      CHECK(((v_next - v + u) - z).cwiseAbs().maxCoeff() <= 1e-12);
      v = v_next;
    }
  }
  SUBCASE("restarting from the fixed point stops after one step") {
    const ReactionDiffusionOperator op(triple, saturating_cubic());
    DrOpts opts;
    opts.lambda = 0.25;
    opts.stop_tol = 1e-9;
    opts.max_iterations = 2000;
    const HSplitRunResult first = dr_solve_h(op, path, x0, opts);
    REQUIRE(first.converged);
    const HSplitRunResult again = dr_solve_h(op, path, x0, opts, &first.v);
    CHECK(again.iterations == 1);
  }
  SUBCASE("linear heat with noise agrees with the reference") {
    const ReactionDiffusionOperator op(triple, zero_reaction());
    DrOpts opts;
    opts.lambda = 0.25;
    opts.stop_tol = 1e-8;
    opts.max_iterations = 2000;
    const ReferenceSolution ref = reference_solve(op, path, x0, opts.solver);
    const HSplitRunResult run = dr_solve_h(op, path, x0, opts, nullptr, &ref.x);
    REQUIRE(run.converged);
    CHECK(path_norm_H(*triple, path.dt, run.x - ref.x) <= 1e-5);
  }
  SUBCASE("odd nonlinearity converges and exposes the weighted variables") {
    const ReactionDiffusionOperator op(triple, saturating_cubic());
    DrOpts opts;
    opts.lambda = 0.25;
    opts.stop_tol = 1e-7;
    opts.max_iterations = 500;
    const HSplitRunResult run = dr_solve_h(op, path, x0, opts);
    CHECK(run.converged);
    CHECK(run.history.back().dv <= 1e-7);
    CHECK((run.v_weighted - weight_exp(path, run.v)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((run.y_weighted - weight_exp(path, run.ztilde)).cwiseAbs().maxCoeff() == 0.0);
  }
}
