#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "spdr/reference.hpp"
#include "spdr/splitting.hpp"

namespace spdr {

enum class EquationKind { quasilinear, porous_media, reaction_diffusion_h };
enum class SchemeKind { dr_v, dr_h };
enum class InitialDatum { sine, bump, random_v };

struct NoiseConfig {
  int j_modes = 8;
  double mu0 = 0.2;
  double decay_p = 2.0;
};

struct RunConfig {
  EquationKind equation = EquationKind::quasilinear;
  SchemeKind scheme = SchemeKind::dr_v;
  int n = 32;
  int steps = 50;        // time steps K
  double horizon = 0.5;  // T
  NoiseConfig noise;
  double lambda = 0.5;
  double delta = 0.05;  // margin added on top of nu in the monotonicity shift
  int max_iterations = 300;
  double stop_tol = 1e-8;
  double newton_tol = 1e-10;
  int paths = 16;
  std::uint64_t base_seed = 1234;
  InitialDatum initial = InitialDatum::sine;
  // equation parameters
  bool linear_flux = false;    // quasilinear: a(r) = r
  bool zero_reaction = false;  // quasilinear / reaction-diffusion: psi = 0
  double quasilinear_nu = -1.0;  // < 0 means auto: nu + delta
  double porous_nu_lin = 0.5;
  double rd_diffusion = 1.0;
  double time_amp = 0.0;  // multiplicative profile 1 + amp sin(t) on the nonlinear parts
  // execution and output
  int workers = 0;  // 0 = hardware concurrency
  bool write_fields = false;
  std::string output_dir;

  void validate() const;
  std::string canonical_string() const;  // covers every numeric parameter
  std::uint64_t hash() const;
};

RunConfig parse_config_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);
std::string config_to_json(const RunConfig& cfg);
// dotted keys, e.g. "noise.mu0=0.3" or "lambda=0.25"
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

std::string to_string(EquationKind k);
std::string to_string(SchemeKind k);
std::string to_string(InitialDatum k);

struct IterationRow {
  int n = 0;
  double dv = 0.0;     // RMS over paths of the successive-difference norm
  double err_V = 0.0;  // Monte Carlo estimate of the L^2((0,T)xOmega;V) error vs reference
  double err_H = 0.0;
  double max_residual = 0.0;  // worst resolvent residual across paths
};

struct PathOutcome {
  std::uint64_t seed = 0;
  bool converged = false;
  int iterations = 0;
  double final_dv = 0.0;
  double final_err_V = 0.0;
  double final_err_H = 0.0;
  double certificate_defect = 0.0;  // max backward-Euler defect of the returned X
  std::string error;                // nonempty if the path failed
};

struct ConvergenceReport {
  std::vector<IterationRow> rows;
  std::vector<PathOutcome> path_outcomes;
  double final_err_V = 0.0;
  double final_err_H = 0.0;
  int iterations = 0;  // max over paths
  int failed_paths = 0;
  double wall_time_s = 0.0;
  std::uint64_t config_hash = 0;
  double nu = 0.0;
  // final X of the first path, captured when write_fields is on
  PathField snapshot_x;
  Eigen::VectorXd snapshot_times;
  Eigen::VectorXd snapshot_nodes;

  bool acceptable() const;  // at most 10% failed paths
};

// For each path: sample the noise, solve the reference system and run the
// configured splitting scheme on the same path (common random numbers), then
// aggregate per-iteration metrics across paths in fixed path order.
ConvergenceReport run_experiment(const RunConfig& cfg);

struct CompareReport {
  double distance_H = 0.0;  // X from dr_v vs X from dr_h, L^2(0,T;H), RMS over paths
  double err_ref_v = 0.0;
  double err_ref_h = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t config_hash = 0;
};

// Runs both schemes on identical paths; only reaction_diffusion_h is solvable
// by both.
CompareReport compare_schemes(const RunConfig& cfg);

void emit_outputs(const ConvergenceReport& report, const RunConfig& cfg,
                  const std::filesystem::path& dir);
void emit_compare(const CompareReport& report, const RunConfig& cfg,
                  const std::filesystem::path& dir);

// wiring shared with the tests
std::shared_ptr<const GelfandTriple> make_triple(const RunConfig& cfg);
std::shared_ptr<MonotoneOperator> make_operator(const RunConfig& cfg,
                                                std::shared_ptr<const GelfandTriple> triple,
                                                double nu_noise);
Eigen::VectorXd make_initial_datum(const RunConfig& cfg, const Grid& grid);
NoiseSpec make_noise_spec(const RunConfig& cfg, std::uint64_t seed);

}  // namespace spdr
