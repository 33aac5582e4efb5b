#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coevo/graphon.hpp"
#include "coevo/model.hpp"

namespace coevo {

// Configuration error with the offending field in the message.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsed experiment manifest: model, kernel, initial phase profile, numerics
// and output blocks. File paths referenced by the config are resolved and
// loaded at parse time.
struct RunConfig {
  // model
  std::optional<ModelSpec> model;
  bool frozen_phases = false;  // verify mode: D amplitude and omega forced to 0

  // kernel
  std::optional<Kernel> kernel;
  std::string kernel_family;

  // initial phase profile (continuous real lift on [0,1])
  std::function<double(double)> phi0;
  std::string phi0_family;

  // numerics
  int n = 16;
  std::vector<int> ns;
  int n_ref = 0;
  double dt = 1e-3;
  double dt_ref = 0.0;
  int stride = 1;
  int quad_subsamples = 4;
  double picard_tol = 1e-6;
  int picard_max_iter = 64;
  double tol_picard_vs_rk4 = 1e-5;
  double tol_exact_update = 1e-8;
  double tol_sync_oracle = 1e-6;
  int verify_max_n = 64;
  double verify_max_horizon = 2.0;

  // output
  std::filesystem::path out_dir = "out";
  bool write_weights = true;

  const ModelSpec& model_spec() const;
  const Kernel& kernel_spec() const;
};

RunConfig parse_config(const nlohmann::json& j,
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace coevo
