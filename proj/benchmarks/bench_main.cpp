#include <benchmark/benchmark.h>

#include <memory>

#include "spdr/reference.hpp"
#include "spdr/rng.hpp"
#include "spdr/splitting.hpp"

namespace {

using namespace spdr;

struct Fixture {
  std::shared_ptr<const GelfandTriple> triple;
  WienerPath path;
  std::shared_ptr<MonotoneOperator> op;
  Eigen::VectorXd x0;
  PathField v;

  Fixture(int n, int steps) {
    triple = std::make_shared<GelfandTriple>(build_grid(n), TripleKind::standard);
    NoiseSpec spec;
    spec.j_modes = 8;
    spec.mu0 = 0.2;
    spec.seed = 1;
    path = sample_path(spec, *triple, steps, 0.5);
    op = std::make_shared<QuasilinearOperator>(triple, default_flux(), default_reaction(),
                                               path.nu + 0.05);
    x0 = triple->laplacian().eigenvector(1);
    NormalSampler rng(2);
    v.resize(n, steps + 1);
    for (int k = 0; k <= steps; ++k) v.col(k) = rng.vector(n);
  }
};

void BM_sample_path(benchmark::State& state) {
  const auto triple = std::make_shared<GelfandTriple>(build_grid(state.range(0)), TripleKind::standard);
  NoiseSpec spec;
  spec.j_modes = 8;
  spec.mu0 = 0.2;
  for (auto _ : state) {
    spec.seed++;
    benchmark::DoNotOptimize(sample_path(spec, *triple, 100, 0.5));
  }
}
BENCHMARK(BM_sample_path)->Arg(32)->Arg(64)->Arg(128);

void BM_stationary_resolvent(benchmark::State& state) {
  Fixture f(state.range(0), 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_resolvent(*f.op, f.path, 0.5, f.v, SolverOpts{}));
  }
}
BENCHMARK(BM_stationary_resolvent)->Arg(32)->Arg(64)->Arg(128);

void BM_evolution_resolvent(benchmark::State& state) {
  Fixture f(state.range(0), 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolution_resolvent(*f.triple, f.path, 0.5, f.x0, f.v));
  }
}
BENCHMARK(BM_evolution_resolvent)->Arg(32)->Arg(64)->Arg(128);

void BM_dr_step(benchmark::State& state) {
  Fixture f(state.range(0), 50);
  DrState s = dr_init(f.v);
  for (auto _ : state) {
    dr_step(s, *f.op, f.path, f.x0, 0.5, SolverOpts{});
    benchmark::DoNotOptimize(s.v);
  }
}
BENCHMARK(BM_dr_step)->Arg(32)->Arg(64)->Arg(128);

void BM_reference_solve(benchmark::State& state) {
  Fixture f(state.range(0), 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference_solve(*f.op, f.path, f.x0, SolverOpts{}));
  }
}
BENCHMARK(BM_reference_solve)->Arg(32)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
