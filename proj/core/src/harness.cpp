#include "spdr/harness.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "spdr/rng.hpp"
#include "spdr/version.hpp"

namespace spdr {

namespace {

constexpr std::uint64_t initial_datum_salt = 0xF1E1D;

int worker_count(const RunConfig& cfg) {
  int w = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  return std::min(w, cfg.paths);
}

}  // namespace

std::shared_ptr<const GelfandTriple> make_triple(const RunConfig& cfg) {
  const TripleKind kind =
      cfg.equation == EquationKind::porous_media ? TripleKind::porous : TripleKind::standard;
  return std::make_shared<GelfandTriple>(build_grid(cfg.n), kind);
}

NoiseSpec make_noise_spec(const RunConfig& cfg, std::uint64_t seed) {
  NoiseSpec s;
  s.j_modes = cfg.noise.j_modes;
  s.mu0 = cfg.noise.mu0;
  s.decay_p = cfg.noise.decay_p;
  s.seed = seed;
  return s;
}

std::shared_ptr<MonotoneOperator> make_operator(const RunConfig& cfg,
                                                std::shared_ptr<const GelfandTriple> triple,
                                                double nu_noise) {
  std::shared_ptr<MonotoneOperator> op;
  switch (cfg.equation) {
    case EquationKind::quasilinear: {
      // the linear zero-order term is absorbed into the operator, which makes
      // the strong-monotonicity margin explicit
      const double nu_coef = cfg.quasilinear_nu < 0.0 ? nu_noise + cfg.delta : cfg.quasilinear_nu;
      op = std::make_shared<QuasilinearOperator>(
          triple, cfg.linear_flux ? linear_flux() : default_flux(),
          cfg.zero_reaction ? zero_reaction() : default_reaction(), nu_coef, cfg.time_amp);
      break;
    }
    case EquationKind::porous_media:
      op = std::make_shared<PorousMediaOperator>(triple, porous_nonlinearity(), cfg.porous_nu_lin,
                                                 cfg.time_amp);
      break;
    case EquationKind::reaction_diffusion_h:
      op = std::make_shared<ReactionDiffusionOperator>(
          triple, cfg.zero_reaction ? zero_reaction() : saturating_cubic(), cfg.rd_diffusion,
          cfg.time_amp);
      break;
  }
  if (op->monotonicity_margin() < nu_noise) {
    op = shift_operator(op, nu_noise, cfg.delta, cfg.horizon);
  }
  return op;
}

Eigen::VectorXd make_initial_datum(const RunConfig& cfg, const Grid& grid) {
  const int n = grid.n_interior;
  Eigen::VectorXd x(n);
  switch (cfg.initial) {
    case InitialDatum::sine:
      for (int i = 0; i < n; ++i) x[i] = std::sin(M_PI * grid.nodes[i]);
      break;
    case InitialDatum::bump: {
      double peak = 0.0;
      for (int i = 0; i < n; ++i) {
        const double xi = grid.nodes[i];
        x[i] = xi * (1.0 - xi) * std::exp(-25.0 * (xi - 0.35) * (xi - 0.35));
        peak = std::max(peak, x[i]);
      }
      x /= peak;
      break;
    }
    case InitialDatum::random_v: {
      // random eigen-coefficients with 1/k^2 decay: an H^1_0 function,
      // deterministic given the base seed and shared by all paths
      NormalSampler rng(path_seed(cfg.base_seed, initial_datum_salt));
      x.setZero();
      const int modes = std::min(n, 12);
      for (int k = 1; k <= modes; ++k) {
        const double c = rng() / (k * k);
        for (int i = 0; i < n; ++i) x[i] += c * std::sin(k * M_PI * grid.nodes[i]);
      }
      break;
    }
  }
  return x;
}

bool ConvergenceReport::acceptable() const {
  return failed_paths * 10 <= static_cast<int>(path_outcomes.size());
}

namespace {

struct PathResult {
  std::vector<IterationDiagnostics> history;
  PathOutcome outcome;
  PathField final_x;
  bool failed = false;
};

PathResult run_single_path(const RunConfig& cfg, const GelfandTriple& triple,
                           const MonotoneOperator& op, const Eigen::VectorXd& x0, int index,
                           bool keep_final_x) {
  PathResult r;
  r.outcome.seed = path_seed(cfg.base_seed, static_cast<std::uint64_t>(index));
  try {
    WienerPath path = sample_path(make_noise_spec(cfg, r.outcome.seed), triple, cfg.steps, cfg.horizon);
    SolverOpts sopts;
    sopts.newton_tol = cfg.newton_tol;
    const ReferenceSolution ref = reference_solve(op, path, x0, sopts);

    DrOpts dopts;
    dopts.lambda = cfg.lambda;
    dopts.max_iterations = cfg.max_iterations;
    dopts.stop_tol = cfg.stop_tol;
    dopts.solver = sopts;

    PathField x_final;
    if (cfg.scheme == SchemeKind::dr_v) {
      SplitRunResult run = dr_solve(op, path, x0, dopts, nullptr, &ref.x);
      r.history = std::move(run.history);
      r.outcome.converged = run.converged;
      r.outcome.iterations = run.iterations;
      x_final = std::move(run.x);
    } else {
      HSplitRunResult run = dr_solve_h(op, path, x0, dopts, nullptr, &ref.x);
      r.history = std::move(run.history);
      r.outcome.converged = run.converged;
      r.outcome.iterations = run.iterations;
      x_final = std::move(run.x);
    }
    const IterationDiagnostics& last = r.history.back();
    r.outcome.final_dv = last.dv;
    r.outcome.final_err_V = last.err_V;
    r.outcome.final_err_H = last.err_H;
    r.outcome.certificate_defect = residual_certificate(op, path, x_final).maxCoeff();
    if (keep_final_x) r.final_x = std::move(x_final);
  } catch (const std::exception& e) {
    r.failed = true;
    r.outcome.error = e.what();
  }
  return r;
}

// Fixed-order reduction across paths; a converged path contributes its final
// row to later iterations, so curves stay defined up to the slowest path.
void aggregate(const std::vector<PathResult>& results, ConvergenceReport& rep) {
  std::size_t max_rows = 0;
  int ok_paths = 0;
  for (const PathResult& r : results) {
    rep.path_outcomes.push_back(r.outcome);
    if (r.failed) {
      ++rep.failed_paths;
      continue;
    }
    ++ok_paths;
    max_rows = std::max(max_rows, r.history.size());
    rep.iterations = std::max(rep.iterations, r.outcome.iterations);
  }
  if (ok_paths == 0) return;
  rep.rows.reserve(max_rows);
  for (std::size_t i = 0; i < max_rows; ++i) {
    IterationRow row;
    row.n = static_cast<int>(i);
    double dv2 = 0.0, ev2 = 0.0, eh2 = 0.0;
    for (const PathResult& r : results) {
      if (r.failed) continue;
      const IterationDiagnostics& d = r.history[std::min(i, r.history.size() - 1)];
      dv2 += d.dv * d.dv;
      ev2 += d.err_V * d.err_V;
      eh2 += d.err_H * d.err_H;
      row.max_residual = std::max({row.max_residual, d.stationary_residual, d.evolution_residual});
    }
    row.dv = std::sqrt(dv2 / ok_paths);
    row.err_V = std::sqrt(ev2 / ok_paths);
    row.err_H = std::sqrt(eh2 / ok_paths);
    rep.rows.push_back(row);
  }
  rep.final_err_V = rep.rows.back().err_V;
  rep.final_err_H = rep.rows.back().err_H;
}

}  // namespace

ConvergenceReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  auto triple = make_triple(cfg);
  const double nu_noise = compute_nu(make_noise_spec(cfg, 0), *triple);
  auto op = make_operator(cfg, triple, nu_noise);
  if (cfg.scheme == SchemeKind::dr_h && cfg.lambda * nu_noise >= 1.0)
    throw SolverError(SolverError::Code::lambda_nu_too_large, -1,
                      "config: lambda * nu >= 1 is not admissible for the dr_h scheme");
  const Eigen::VectorXd x0 = make_initial_datum(cfg, triple->grid());

  std::vector<PathResult> results(cfg.paths);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int m = next.fetch_add(1); m < cfg.paths; m = next.fetch_add(1)) {
      results[m] = run_single_path(cfg, *triple, *op, x0, m, cfg.write_fields && m == 0);
    }
  };
  const int nw = worker_count(cfg);
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  ConvergenceReport rep;
  rep.config_hash = cfg.hash();
  rep.nu = nu_noise;
  aggregate(results, rep);
  if (cfg.write_fields && !results.empty() && !results.front().failed) {
    const PathField& x = results.front().final_x;
    const int picks = 5;
    rep.snapshot_x.resize(x.rows(), picks);
    rep.snapshot_times.resize(picks);
    for (int i = 0; i < picks; ++i) {
      const int k = (cfg.steps * i) / (picks - 1);
      rep.snapshot_x.col(i) = x.col(k);
      rep.snapshot_times[i] = k * cfg.horizon / cfg.steps;
    }
    rep.snapshot_nodes = triple->grid().nodes;
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

CompareReport compare_schemes(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.equation != EquationKind::reaction_diffusion_h)
    throw std::invalid_argument("compare_schemes: requires equation reaction_diffusion_h");
  const auto t0 = std::chrono::steady_clock::now();

  auto triple = make_triple(cfg);
  const double nu_noise = compute_nu(make_noise_spec(cfg, 0), *triple);
  if (cfg.lambda * nu_noise >= 1.0)
    throw SolverError(SolverError::Code::lambda_nu_too_large, -1,
                      "compare_schemes: lambda * nu >= 1 is not admissible for the dr_h scheme");
  auto op = make_operator(cfg, triple, nu_noise);
  const Eigen::VectorXd x0 = make_initial_datum(cfg, triple->grid());

  SolverOpts sopts;
  sopts.newton_tol = cfg.newton_tol;
  DrOpts dopts;
  dopts.lambda = cfg.lambda;
  dopts.max_iterations = cfg.max_iterations;
  dopts.stop_tol = cfg.stop_tol;
  dopts.solver = sopts;

  double d2 = 0.0, ev2 = 0.0, eh2 = 0.0;
  for (int m = 0; m < cfg.paths; ++m) {
    WienerPath path =
        sample_path(make_noise_spec(cfg, path_seed(cfg.base_seed, m)), *triple, cfg.steps, cfg.horizon);
    const ReferenceSolution ref = reference_solve(*op, path, x0, sopts);
    const SplitRunResult rv = dr_solve(*op, path, x0, dopts);
    const HSplitRunResult rh = dr_solve_h(*op, path, x0, dopts);
    const double dvh = path_norm_H(*triple, path.dt, rv.x - rh.x);
    d2 += dvh * dvh;
    const double e1 = path_norm_H(*triple, path.dt, rv.x - ref.x);
    const double e2 = path_norm_H(*triple, path.dt, rh.x - ref.x);
    ev2 += e1 * e1;
    eh2 += e2 * e2;
  }
  CompareReport rep;
  rep.distance_H = std::sqrt(d2 / cfg.paths);
  rep.err_ref_v = std::sqrt(ev2 / cfg.paths);
  rep.err_ref_h = std::sqrt(eh2 / cfg.paths);
  rep.config_hash = cfg.hash();
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016" PRIx64, h);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + p.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_outputs(const ConvergenceReport& rep, const RunConfig& cfg,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::string csv = "n,dv_norm,errV,errH,max_resolvent_residual\n";
  for (const IterationRow& r : rep.rows) {
    csv += std::to_string(r.n);
    csv += ',';
    csv += csv_number(r.dv);
    csv += ',';
    csv += csv_number(r.err_V);
    csv += ',';
    csv += csv_number(r.err_H);
    csv += ',';
    csv += csv_number(r.max_residual);
    csv += '\n';
  }
  write_file(dir / "convergence.csv", csv);

  nlohmann::json j;
  j["schema_version"] = summary_schema_version;
  j["version"] = version;
  j["config"] = nlohmann::json::parse(config_to_json(cfg));
  j["config_hash"] = hash_hex(rep.config_hash);
  j["nu"] = rep.nu;
  j["base_seed"] = cfg.base_seed;
  nlohmann::json seeds = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  int converged = 0;
  for (const PathOutcome& o : rep.path_outcomes) {
    seeds.push_back(o.seed);
    if (!o.error.empty()) failures.push_back(o.error);
    if (o.converged) ++converged;
  }
  j["path_seeds"] = seeds;
  j["final"] = {{"errV", rep.final_err_V},
                {"errH", rep.final_err_H},
                {"iterations", rep.iterations},
                {"converged_paths", converged},
                {"failed_paths", rep.failed_paths}};
  j["failures"] = failures;
  j["wall_time_s"] = rep.wall_time_s;
  write_file(dir / "summary.json", j.dump(2) + "\n");

  if (rep.snapshot_x.size() > 0) {
    std::string fields = "xi";
    for (int c = 0; c < rep.snapshot_times.size(); ++c) {
      fields += ",X_t";
      fields += csv_number(rep.snapshot_times[c]);
    }
    fields += '\n';
    for (int i = 0; i < rep.snapshot_x.rows(); ++i) {
      fields += csv_number(rep.snapshot_nodes[i]);
      for (int c = 0; c < rep.snapshot_x.cols(); ++c) {
        fields += ',';
        fields += csv_number(rep.snapshot_x(i, c));
      }
      fields += '\n';
    }
    write_file(dir / "fields.csv", fields);
  }
}

void emit_compare(const CompareReport& rep, const RunConfig& cfg,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["schema_version"] = summary_schema_version;
  j["version"] = version;
  j["config"] = nlohmann::json::parse(config_to_json(cfg));
  j["config_hash"] = hash_hex(rep.config_hash);
  j["distance_H"] = rep.distance_H;
  j["err_ref_dr_v"] = rep.err_ref_v;
  j["err_ref_dr_h"] = rep.err_ref_h;
  j["wall_time_s"] = rep.wall_time_s;
  write_file(dir / "compare.json", j.dump(2) + "\n");
}

}  // namespace spdr
