#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spdr/harness.hpp"

namespace spdr {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

EquationKind equation_from_string(const std::string& s) {
  if (s == "quasilinear") return EquationKind::quasilinear;
  if (s == "porous_media") return EquationKind::porous_media;
  if (s == "reaction_diffusion_h") return EquationKind::reaction_diffusion_h;
  throw std::invalid_argument("unknown equation: " + s);
}

SchemeKind scheme_from_string(const std::string& s) {
  if (s == "dr_v") return SchemeKind::dr_v;
  if (s == "dr_h") return SchemeKind::dr_h;
  throw std::invalid_argument("unknown scheme: " + s);
}

InitialDatum initial_from_string(const std::string& s) {
  if (s == "sine") return InitialDatum::sine;
  if (s == "bump") return InitialDatum::bump;
  if (s == "random_v") return InitialDatum::random_v;
  throw std::invalid_argument("unknown initial datum: " + s);
}

}  // namespace

std::string to_string(EquationKind k) {
  switch (k) {
    case EquationKind::quasilinear: return "quasilinear";
    case EquationKind::porous_media: return "porous_media";
    default: return "reaction_diffusion_h";
  }
}

std::string to_string(SchemeKind k) { return k == SchemeKind::dr_v ? "dr_v" : "dr_h"; }

std::string to_string(InitialDatum k) {
  switch (k) {
    case InitialDatum::sine: return "sine";
    case InitialDatum::bump: return "bump";
    default: return "random_v";
  }
}

void RunConfig::validate() const {
  if (n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
  if (delta < 0.0) throw std::invalid_argument("config: delta must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("config: max_iterations must be >= 1");
  if (!(stop_tol > 0.0)) throw std::invalid_argument("config: stop_tol must be positive");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("config: newton_tol must be positive");
  if (paths < 1) throw std::invalid_argument("config: paths must be >= 1");
  if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");
  if (time_amp < 0.0 || time_amp >= 1.0) throw std::invalid_argument("config: time_amp in [0,1)");
  if (!(porous_nu_lin > 0.0)) throw std::invalid_argument("config: porous_nu_lin must be positive");
  if (rd_diffusion < 0.0) throw std::invalid_argument("config: rd_diffusion must be >= 0");
  NoiseSpec spec{noise.j_modes, noise.mu0, noise.decay_p, 0};
  spec.validate();
  if (scheme == SchemeKind::dr_h && equation != EquationKind::reaction_diffusion_h)
    throw std::invalid_argument("config: scheme dr_h requires equation reaction_diffusion_h");
}

std::string RunConfig::canonical_string() const {
  std::ostringstream s;
  s << "equation=" << to_string(equation) << ";scheme=" << to_string(scheme) << ";n=" << n
    << ";steps=" << steps << ";horizon=" << fmt(horizon) << ";noise.j_modes=" << noise.j_modes
    << ";noise.mu0=" << fmt(noise.mu0) << ";noise.decay_p=" << fmt(noise.decay_p)
    << ";lambda=" << fmt(lambda) << ";delta=" << fmt(delta) << ";max_iterations=" << max_iterations
    << ";stop_tol=" << fmt(stop_tol) << ";newton_tol=" << fmt(newton_tol) << ";paths=" << paths
    << ";base_seed=" << base_seed << ";initial=" << to_string(initial)
    << ";linear_flux=" << linear_flux << ";zero_reaction=" << zero_reaction
    << ";quasilinear_nu=" << fmt(quasilinear_nu) << ";porous_nu_lin=" << fmt(porous_nu_lin)
    << ";rd_diffusion=" << fmt(rd_diffusion) << ";time_amp=" << fmt(time_amp);
  return s.str();
}

std::uint64_t RunConfig::hash() const {
  // FNV-1a over the canonical parameter string
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : canonical_string()) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

RunConfig config_from_json(const json& j) {
  static const char* known_top[] = {"equation", "scheme", "n", "steps", "horizon", "noise",
                                    "lambda", "delta", "max_iterations", "stop_tol", "newton_tol",
                                    "paths", "base_seed", "initial", "equation_params", "workers",
                                    "write_fields", "output_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known_top) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }

  RunConfig c;
  if (j.contains("equation")) c.equation = equation_from_string(j.at("equation").get<std::string>());
  if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  read_field(j, "n", c.n);
  read_field(j, "steps", c.steps);
  read_field(j, "horizon", c.horizon);
  if (j.contains("noise")) {
    const json& nj = j.at("noise");
    read_field(nj, "j_modes", c.noise.j_modes);
    read_field(nj, "mu0", c.noise.mu0);
    read_field(nj, "decay_p", c.noise.decay_p);
  }
  read_field(j, "lambda", c.lambda);
  read_field(j, "delta", c.delta);
  read_field(j, "max_iterations", c.max_iterations);
  read_field(j, "stop_tol", c.stop_tol);
  read_field(j, "newton_tol", c.newton_tol);
  read_field(j, "paths", c.paths);
  read_field(j, "base_seed", c.base_seed);
  if (j.contains("initial")) c.initial = initial_from_string(j.at("initial").get<std::string>());
  if (j.contains("equation_params")) {
    const json& ej = j.at("equation_params");
    read_field(ej, "linear_flux", c.linear_flux);
    read_field(ej, "zero_reaction", c.zero_reaction);
    if (ej.contains("quasilinear_nu")) {
      if (ej.at("quasilinear_nu").is_string()) {
        if (ej.at("quasilinear_nu").get<std::string>() != "auto")
          throw std::invalid_argument("config: quasilinear_nu must be a number or \"auto\"");
        c.quasilinear_nu = -1.0;
      } else {
        c.quasilinear_nu = ej.at("quasilinear_nu").get<double>();
      }
    }
    read_field(ej, "porous_nu_lin", c.porous_nu_lin);
    read_field(ej, "rd_diffusion", c.rd_diffusion);
    read_field(ej, "time_amp", c.time_amp);
  }
  read_field(j, "workers", c.workers);
  read_field(j, "write_fields", c.write_fields);
  read_field(j, "output_dir", c.output_dir);
  c.validate();
  return c;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) { return config_from_json(json::parse(text)); }

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open config file: " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["equation"] = to_string(c.equation);
  j["scheme"] = to_string(c.scheme);
  j["n"] = c.n;
  j["steps"] = c.steps;
  j["horizon"] = c.horizon;
  j["noise"] = {{"j_modes", c.noise.j_modes}, {"mu0", c.noise.mu0}, {"decay_p", c.noise.decay_p}};
  j["lambda"] = c.lambda;
  j["delta"] = c.delta;
  j["max_iterations"] = c.max_iterations;
  j["stop_tol"] = c.stop_tol;
  j["newton_tol"] = c.newton_tol;
  j["paths"] = c.paths;
  j["base_seed"] = c.base_seed;
  j["initial"] = to_string(c.initial);
  json ej;
  ej["linear_flux"] = c.linear_flux;
  ej["zero_reaction"] = c.zero_reaction;
  if (c.quasilinear_nu < 0.0)
    ej["quasilinear_nu"] = "auto";
  else
    ej["quasilinear_nu"] = c.quasilinear_nu;
  ej["porous_nu_lin"] = c.porous_nu_lin;
  ej["rd_diffusion"] = c.rd_diffusion;
  ej["time_amp"] = c.time_amp;
  j["equation_params"] = ej;
  j["workers"] = c.workers;
  j["write_fields"] = c.write_fields;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
  auto as_int = [&] { return std::stoi(value); };
  auto as_double = [&] { return std::stod(value); };
  auto as_bool = [&] {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("override " + key + ": expected a boolean, got '" + value + "'");
  };

  if (key == "equation") c.equation = equation_from_string(value);
  else if (key == "scheme") c.scheme = scheme_from_string(value);
  else if (key == "n") c.n = as_int();
  else if (key == "steps") c.steps = as_int();
  else if (key == "horizon") c.horizon = as_double();
  else if (key == "noise.j_modes") c.noise.j_modes = as_int();
  else if (key == "noise.mu0") c.noise.mu0 = as_double();
  else if (key == "noise.decay_p") c.noise.decay_p = as_double();
  else if (key == "lambda") c.lambda = as_double();
  else if (key == "delta") c.delta = as_double();
  else if (key == "max_iterations") c.max_iterations = as_int();
  else if (key == "stop_tol") c.stop_tol = as_double();
  else if (key == "newton_tol") c.newton_tol = as_double();
  else if (key == "paths") c.paths = as_int();
  else if (key == "base_seed") c.base_seed = std::stoull(value);
  else if (key == "initial") c.initial = initial_from_string(value);
  else if (key == "equation_params.linear_flux") c.linear_flux = as_bool();
  else if (key == "equation_params.zero_reaction") c.zero_reaction = as_bool();
  else if (key == "equation_params.quasilinear_nu") c.quasilinear_nu = value == "auto" ? -1.0 : as_double();
  else if (key == "equation_params.porous_nu_lin") c.porous_nu_lin = as_double();
  else if (key == "equation_params.rd_diffusion") c.rd_diffusion = as_double();
  else if (key == "equation_params.time_amp") c.time_amp = as_double();
  else if (key == "workers") c.workers = as_int();
  else if (key == "write_fields") c.write_fields = as_bool();
  else if (key == "output_dir") c.output_dir = value;
  else throw std::invalid_argument("unknown config key: " + key);
  c.validate();
}

}  // namespace spdr
