// Command-line driver: simulate / converge / verify / bounds workflows over a
// JSON experiment manifest. Exit codes: 0 ok, 1 validation error, 2 check
// failure.

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "coevo/analysis.hpp"
#include "coevo/config.hpp"
#include "coevo/dynamics.hpp"
#include "coevo/graphon.hpp"
#include "coevo/io.hpp"
#include "coevo/metrics.hpp"

namespace {

using namespace coevo;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCheckFailed = 2;

struct Overrides {
  std::optional<int> n;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<int> stride;
  std::optional<std::string> out_dir;
};

void apply(const Overrides& o, RunConfig& cfg) {
  if (o.n) {
    if (*o.n < 1) throw ConfigError("--n must be >= 1");
    cfg.n = *o.n;
  }
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt must be > 0");
    cfg.dt = *o.dt;
  }
  if (o.horizon) {
    if (!(*o.horizon > 0.0)) throw ConfigError("--T must be > 0");
    if (cfg.model) cfg.model->horizon = *o.horizon;
  }
  if (o.stride) {
    if (*o.stride < 1) throw ConfigError("--stride must be >= 1");
    cfg.stride = *o.stride;
  }
  if (o.out_dir) cfg.out_dir = *o.out_dir;
}

SystemState discretize_initial(const RunConfig& cfg, int n) {
  const Partition p(n);
  if (!cfg.phi0) throw ConfigError("config: missing 'initial_phase' block");
  auto phases = discretize_phases(cfg.phi0, p, cfg.quad_subsamples);
  auto weights = discretize_weights_average(cfg.kernel_spec(), p, cfg.quad_subsamples);
  return SystemState(cfg.model_spec().t0, std::move(phases.phases),
                     std::move(weights.weights));
}

bool sync_manifold_applicable(const RunConfig& cfg, const SystemState& initial) {
  const auto& m = cfg.model_spec();
  if (m.omega.family() != FrequencySpec::Family::kConstant ||
      m.coupling_d.family() != CouplingSpec::Family::kSineLag ||
      m.coupling_h.family() != CouplingSpec::Family::kSineLag)
    return false;
  for (double phi : initial.phases)
    if (phi != initial.phases.front()) return false;
  for (double w : initial.weights)
    if (w != initial.weights.front()) return false;
  return true;
}

int run_simulate(const RunConfig& cfg) {
  const auto& model = cfg.model_spec();
  const auto report = check_assumptions(cfg.kernel_spec(), model, cfg.phi0);
  write_json(to_json(report), cfg.out_dir / "assumptions.json");
  if (!report.regularity_pass()) {
    std::cerr << "assumption check failed:\n" << report.summary();
    return kExitCheckFailed;
  }
  if (!report.all_pass())
    std::cerr << "note: positivity floor (A5) not satisfied; the positivity claim "
                 "is not asserted for this run\n";

  const auto initial = discretize_initial(cfg, cfg.n);
  const bool oracle = sync_manifold_applicable(cfg, initial);

  const auto start = std::chrono::steady_clock::now();
  const auto traj = integrate(initial, model, cfg.dt, cfg.stride, cfg.quad_subsamples);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_trajectory_csv(traj, cfg.out_dir / "trajectory.csv", cfg.write_weights);
  write_order_parameter_csv(traj, cfg.out_dir / "order_parameter.csv");

  const auto positivity = positivity_monitor(traj, model);
  write_json(to_json(positivity), cfg.out_dir / "positivity.json");

  const auto op0 = order_parameter(traj.initial().phases);
  const auto op1 = order_parameter(traj.final_state().phases);

  json summary = {
      {"model", model.describe()},
      {"n", cfg.n},
      {"dt", cfg.dt},
      {"stride", cfg.stride},
      {"snapshots", traj.size()},
      {"runtime_seconds", seconds},
      {"min_weight", positivity.min_weight},
      {"order_parameter",
       {{"r_t0", op0.r}, {"psi_t0", op0.psi.wrapped()}, {"r_final", op1.r},
        {"psi_final", op1.psi.wrapped()}}},
      {"positivity", to_json(positivity)},
      {"files", {"trajectory.csv", "order_parameter.csv", "positivity.json",
                 "assumptions.json"}},
  };

  if (oracle) {
    double max_phi = 0.0, max_w = 0.0;
    for (size_t k = 0; k < traj.size(); ++k) {
      const auto exact = sync_manifold_solution(initial.phases[0], initial.weights[0],
                                                model, traj.times[k]);
      for (double phi : traj.states[k].phases)
        max_phi = std::max(max_phi, std::abs(phi - exact.phi));
      for (double w : traj.states[k].weights)
        max_w = std::max(max_w, std::abs(w - exact.w));
    }
    summary["sync_oracle"] = {{"applicable", true},
                              {"max_phase_error", max_phi},
                              {"max_weight_error", max_w},
                              {"tolerance", cfg.tol_sync_oracle},
                              {"pass", max_phi <= cfg.tol_sync_oracle &&
                                           max_w <= cfg.tol_sync_oracle}};
  } else {
    summary["sync_oracle"] = {{"applicable", false}};
  }

  write_json(summary, cfg.out_dir / "summary.json");
  std::cout << "simulate: n=" << cfg.n << " dt=" << cfg.dt << " snapshots="
            << traj.size() << " min_weight=" << positivity.min_weight
            << " r_final=" << op1.r << " (" << seconds << " s)\n";
  if (oracle && !summary["sync_oracle"]["pass"].get<bool>()) {
    std::cerr << "sync-manifold oracle exceeded tolerance\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int run_converge(const RunConfig& cfg) {
  if (cfg.ns.empty())
    throw ConfigError("converge: numerics.Ns and numerics.n_ref are required");
  const auto& model = cfg.model_spec();
  const auto start = std::chrono::steady_clock::now();
  const auto report = self_convergence_study(cfg.kernel_spec(), cfg.phi0, model,
                                             cfg.ns, cfg.n_ref, cfg.dt, cfg.dt_ref,
                                             cfg.stride, cfg.quad_subsamples);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto j = to_json(report);
  j["runtime_seconds"] = seconds;
  write_json(j, cfg.out_dir / "convergence.json");
  write_convergence_csv(report, cfg.out_dir / "convergence.csv");

  std::cout << "self-convergence vs n_ref=" << report.n_ref << " (dt_ref="
            << report.dt_ref << ", snapshot interval=" << report.snapshot_interval
            << ")\n";
  for (size_t k = 0; k < report.records.size(); ++k) {
    std::cout << "  n=" << report.records[k].n
              << "  d_T,inf=" << format_double(report.records[k].error);
    if (k > 0 && report.rates[k - 1])
      std::cout << "  rate=" << *report.rates[k - 1];
    std::cout << "\n";
  }
  std::cout << (report.monotone ? "errors strictly decreasing\n"
                                : "errors NOT strictly decreasing\n")
            << "(" << seconds << " s)\n";
  return report.monotone ? kExitOk : kExitCheckFailed;
}

int run_verify(const RunConfig& cfg) {
  const auto& model = cfg.model_spec();
  if (cfg.n > cfg.verify_max_n)
    throw ConfigError("verify: n exceeds the Picard guard (verify_max_n)");
  if (model.horizon > cfg.verify_max_horizon)
    throw ConfigError("verify: T exceeds the Picard guard (verify_max_T)");

  const auto initial = discretize_initial(cfg, cfg.n);
  const auto rk4 = integrate(initial, model, cfg.dt, 1, cfg.quad_subsamples);

  json out;
  bool ok = true;

  try {
    const auto picard =
        picard_solve(initial, model, cfg.dt, cfg.picard_tol, cfg.picard_max_iter,
                     cfg.quad_subsamples);
    const double d = d_interval_infty(lift(picard.trajectory), lift(rk4));
    const bool pass = d <= cfg.tol_picard_vs_rk4;
    ok = ok && pass;
    out["picard_vs_rk4"] = {{"distance", d},
                            {"tolerance", cfg.tol_picard_vs_rk4},
                            {"pass", pass},
                            {"m3", picard.stats.m3},
                            {"window_length", picard.stats.window_length},
                            {"windows", picard.stats.windows},
                            {"max_applications", picard.stats.max_applications}};
    std::cout << "picard vs rk4: d_T,inf=" << format_double(d)
              << (pass ? " pass" : " FAIL") << "\n";
  } catch (const std::runtime_error& e) {
    ok = false;
    out["picard_vs_rk4"] = {{"error", e.what()}, {"pass", false}};
    std::cout << "picard: " << e.what() << "\n";
  }

  {
    const auto exact = weights_exact_update(initial.weights, rk4, model);
    double diff = 0.0;
    const auto& final_w = rk4.final_state().weights;
    for (size_t m = 0; m < exact.size(); ++m)
      diff = std::max(diff, std::abs(exact[m] - final_w[m]));
    const bool pass = diff <= cfg.tol_exact_update;
    ok = ok && pass;
    out["exact_update_vs_rk4"] = {{"max_abs_diff", diff},
                                  {"tolerance", cfg.tol_exact_update},
                                  {"pass", pass}};
    std::cout << "integrating-factor vs rk4 weights: max|diff|="
              << format_double(diff) << (pass ? " pass" : " FAIL") << "\n";
  }

  out["pass"] = ok;
  write_json(out, cfg.out_dir / "verify.json");
  return ok ? kExitOk : kExitCheckFailed;
}

int run_bounds(const RunConfig& cfg) {
  const auto& model = cfg.model_spec();
  json out;

  const double threshold =
      positivity_threshold(model.coupling_h, model.epsilon, model.horizon);
  out["positivity_threshold"] = threshold;

  double eta0_star = 0.0;
  if (cfg.kernel) {
    const auto g =
        discretize_weights_average(cfg.kernel_spec(), Partition(cfg.n),
                                   cfg.quad_subsamples);
    eta0_star = g.max_fiber_tv();
    const double c_w = cfg.kernel_spec().inf_bound();
    out["c_w"] = c_w;
    if (model.epsilon == 0.0) {
      out["berner_horizon"] = nullptr;
      out["horizon_unbounded"] = true;
    } else if (c_w > 0.0) {
      out["berner_horizon"] = berner_horizon_bound(c_w, model.epsilon);
      out["horizon_unbounded"] = false;
    } else {
      out["berner_horizon"] = nullptr;
      out["horizon_note"] = "inf W <= 0: the horizon bound does not apply";
    }
  }

  const auto bounds = BoundParams::from_model(model, eta0_star);
  out["eta0_star"] = eta0_star;
  out["eta_star"] = bounds.eta_star;
  out["c1"] = bounds.c1();
  out["apriori_weight_bound"] = eta0_star + model.coupling_h.sup_norm();

  const double sigma = model.coupling_h.sup_norm() + eta0_star;
  const double m3 = 4.0 *
                    (model.omega.lipschitz() + model.coupling_d.lipschitz() +
                     model.coupling_d.sup_norm() +
                     model.epsilon * (1.0 + model.coupling_h.lipschitz())) *
                    (eta0_star + sigma);
  out["sigma"] = sigma;
  out["m3"] = m3;
  out["picard_window"] = m3 > 0.0 ? json(0.5 / m3) : json(nullptr);

  write_json(out, cfg.out_dir / "bounds.json");
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive Kuramoto network laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  app.add_option("-c,--config", config_path, "experiment manifest (JSON)")
      ->required();
  app.add_option("--n", overrides.n, "override numerics.n");
  app.add_option("--dt", overrides.dt, "override numerics.dt");
  app.add_option("--T", overrides.horizon, "override model.T");
  app.add_option("--stride", overrides.stride, "override numerics.stride");
  app.add_option("--out", overrides.out_dir, "override output.dir");

  auto* sim = app.add_subcommand("simulate", "discretize and integrate one run");
  auto* con = app.add_subcommand("converge", "self-convergence study over Ns");
  auto* ver = app.add_subcommand("verify", "Picard and integrating-factor oracles");
  auto* bnd = app.add_subcommand("bounds", "print the analytic bound values");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = coevo::load_config(config_path);
    apply(overrides, cfg);
    if (sim->parsed()) return run_simulate(cfg);
    if (con->parsed()) return run_converge(cfg);
    if (ver->parsed()) return run_verify(cfg);
    if (bnd->parsed()) return run_bounds(cfg);
    return kExitValidation;
  } catch (const coevo::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}
