#include "coevo/config.hpp"

#include <cmath>
#include <fstream>

#include "coevo/io.hpp"

namespace coevo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

const json& require(const json& j, const std::string& key, const std::string& scope) {
  auto it = j.find(key);
  if (it == j.end()) fail(scope + key, "missing");
  return *it;
}

double num(const json& j, const std::string& key, const std::string& scope) {
  const auto& v = require(j, key, scope);
  if (!v.is_number()) fail(scope + key, "expected a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) fail(key, "expected a number");
  return it->get<double>();
}

int int_or(const json& j, const std::string& key, int fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) fail(key, "expected an integer");
  return it->get<int>();
}

std::string str_or(const json& j, const std::string& key, const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) fail(key, "expected a string");
  return it->get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

CouplingSpec parse_coupling(const json& j, const std::string& scope,
                            const std::filesystem::path& base, double default_amp,
                            double default_lag) {
  if (j.contains("table")) {
    const auto path = resolve(base, require(j, "table", scope).get<std::string>());
    if (!std::filesystem::exists(path))
      fail(scope + "table", "file does not exist: " + path.string());
    auto g = read_step_graphon_csv(path);
    return CouplingSpec::tabulated(std::move(g.weights), g.partition.n);
  }
  return CouplingSpec::sine_lag(num_or(j, "amplitude", default_amp),
                                num_or(j, "lag", default_lag));
}

FrequencySpec parse_frequency(const json& j, const std::string& scope) {
  const std::string family = str_or(j, "family", "constant");
  if (family == "constant") return FrequencySpec::constant(num(j, "value", scope));
  if (family == "affine")
    return FrequencySpec::affine(num(j, "offset", scope), num(j, "slope", scope));
  if (family == "tabulated") {
    const auto& vals = require(j, "values", scope);
    if (!vals.is_array() || vals.empty()) fail(scope + "values", "expected an array");
    return FrequencySpec::tabulated(vals.get<std::vector<double>>());
  }
  fail(scope + "family", "unknown frequency family '" + family + "'");
}

ModelSpec parse_model(const json& j, const std::filesystem::path& base) {
  const double epsilon = num(j, "epsilon", "model.");
  const double t0 = num_or(j, "t0", 0.0);
  const double horizon = num(j, "T", "model.");
  if (!(epsilon >= 0.0)) fail("model.epsilon", "must be >= 0");
  if (!(horizon > 0.0)) fail("model.T", "must be > 0");

  double b = num_or(j, "b", 0.0);
  const std::string preset = str_or(j, "preset", "");
  if (preset == "hebbian") b = 0.0;
  else if (preset == "stdp") b = -kTwoPi / 4.0;
  else if (!preset.empty()) fail("model.preset", "unknown preset '" + preset + "'");

  CouplingSpec d = j.contains("coupling_d")
                       ? parse_coupling(j["coupling_d"], "model.coupling_d.", base,
                                        1.0, num_or(j, "a", 0.0))
                       : CouplingSpec::sine_lag(1.0, num_or(j, "a", 0.0));
  CouplingSpec h = j.contains("coupling_h")
                       ? parse_coupling(j["coupling_h"], "model.coupling_h.", base,
                                        1.0, b)
                       : CouplingSpec::sine_lag(1.0, b);
  FrequencySpec omega = j.contains("omega_spec")
                            ? parse_frequency(j["omega_spec"], "model.omega_spec.")
                            : FrequencySpec::constant(num(j, "omega0", "model."));
  return ModelSpec(std::move(d), std::move(h), std::move(omega), epsilon, t0, horizon);
}

Kernel parse_kernel(const json& j, const std::filesystem::path& base,
                    std::string& family_out) {
  const std::string family = str_or(j, "family", "constant");
  family_out = family;
  if (family == "constant") return Kernel::constant(num(j, "value", "kernel."));
  if (family == "cosine-shift")
    return Kernel::cosine_shift(num(j, "base", "kernel."),
                                num(j, "amplitude", "kernel."));
  if (family == "product")
    return Kernel::product(num(j, "scale", "kernel."), num_or(j, "offset", 0.0));
  if (family == "tabulated") {
    const auto path = resolve(base, require(j, "csv", "kernel.").get<std::string>());
    if (!std::filesystem::exists(path))
      fail("kernel.csv", "file does not exist: " + path.string());
    return read_tabulated_kernel_csv(path);
  }
  fail("kernel.family", "unknown kernel family '" + family + "'");
}

std::function<double(double)> parse_phase_profile(const json& j,
                                                  std::string& family_out) {
  const std::string family = str_or(j, "family", "constant");
  family_out = family;
  if (family == "constant") {
    const double v = num(j, "value", "initial_phase.");
    return [v](double) { return v; };
  }
  if (family == "linear") {
    const double offset = num_or(j, "offset", 0.0);
    const double slope = num(j, "slope", "initial_phase.");
    return [offset, slope](double x) { return offset + slope * x; };
  }
  if (family == "sine") {
    const double offset = num_or(j, "offset", 0.0);
    const double amplitude = num(j, "amplitude", "initial_phase.");
    const double cycles = num_or(j, "cycles", 1.0);
    return [offset, amplitude, cycles](double x) {
      return offset + amplitude * std::sin(kTwoPi * cycles * x);
    };
  }
  fail("initial_phase.family", "unknown phase family '" + family + "'");
}

}  // namespace

const ModelSpec& RunConfig::model_spec() const {
  if (!model) throw ConfigError("config: missing 'model' block");
  return *model;
}

const Kernel& RunConfig::kernel_spec() const {
  if (!kernel) throw ConfigError("config: missing 'kernel' block");
  return *kernel;
}

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base) {
  RunConfig cfg;
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  if (j.contains("model")) {
    cfg.model = parse_model(j["model"], base);
    cfg.frozen_phases = j["model"].value("frozen_phases", false);
    if (cfg.frozen_phases) {
      // freeze: no intrinsic drift, no coupling drive; weights still adapt
      cfg.model = ModelSpec(CouplingSpec::sine_lag(0.0, cfg.model->coupling_d.lag()),
                            cfg.model->coupling_h, FrequencySpec::constant(0.0),
                            cfg.model->epsilon, cfg.model->t0, cfg.model->horizon);
    }
  }
  if (j.contains("kernel")) cfg.kernel = parse_kernel(j["kernel"], base, cfg.kernel_family);
  if (j.contains("initial_phase"))
    cfg.phi0 = parse_phase_profile(j["initial_phase"], cfg.phi0_family);

  if (j.contains("numerics")) {
    const auto& nj = j["numerics"];
    cfg.n = int_or(nj, "n", cfg.n);
    if (cfg.n < 1) fail("numerics.n", "must be >= 1");
    if (nj.contains("Ns")) {
      if (!nj["Ns"].is_array() || nj["Ns"].empty())
        fail("numerics.Ns", "expected a non-empty array");
      cfg.ns = nj["Ns"].get<std::vector<int>>();
    }
    cfg.n_ref = int_or(nj, "n_ref", cfg.n_ref);
    cfg.dt = num_or(nj, "dt", cfg.dt);
    if (!(cfg.dt > 0.0)) fail("numerics.dt", "must be > 0");
    cfg.dt_ref = num_or(nj, "dt_ref", cfg.dt_ref);
    cfg.stride = int_or(nj, "stride", cfg.stride);
    if (cfg.stride < 1) fail("numerics.stride", "must be >= 1");
    cfg.quad_subsamples = int_or(nj, "quad_subsamples", cfg.quad_subsamples);
    if (cfg.quad_subsamples < 1) fail("numerics.quad_subsamples", "must be >= 1");
    cfg.picard_tol = num_or(nj, "picard_tol", cfg.picard_tol);
    cfg.picard_max_iter = int_or(nj, "picard_max_iter", cfg.picard_max_iter);
    cfg.tol_picard_vs_rk4 = num_or(nj, "tol_picard_vs_rk4", cfg.tol_picard_vs_rk4);
    cfg.tol_exact_update = num_or(nj, "tol_exact_update", cfg.tol_exact_update);
    cfg.tol_sync_oracle = num_or(nj, "tol_sync_oracle", cfg.tol_sync_oracle);
    cfg.verify_max_n = int_or(nj, "verify_max_n", cfg.verify_max_n);
    cfg.verify_max_horizon = num_or(nj, "verify_max_T", cfg.verify_max_horizon);
  }

  if (j.contains("output")) {
    const auto& oj = j["output"];
    // input paths resolve against the config file; outputs against the cwd
    cfg.out_dir = str_or(oj, "dir", cfg.out_dir.string());
    cfg.write_weights = oj.value("weights", cfg.write_weights);
  }

  // cross-block validation for convergence studies
  if (!cfg.ns.empty()) {
    if (cfg.n_ref < 1) fail("numerics.n_ref", "required when Ns is given");
    for (size_t k = 0; k < cfg.ns.size(); ++k) {
      if (cfg.ns[k] < 1 || cfg.n_ref % cfg.ns[k] != 0)
        fail("numerics.Ns", "every entry must divide n_ref");
      if (k > 0 && cfg.ns[k] <= cfg.ns[k - 1])
        fail("numerics.Ns", "must be strictly increasing");
    }
    if (!(cfg.dt_ref > 0.0)) fail("numerics.dt_ref", "required when Ns is given");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.has_parent_path() ? path.parent_path() : ".");
}

}  // namespace coevo
