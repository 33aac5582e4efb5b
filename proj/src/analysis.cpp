#include "coevo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace coevo {

BoundParams BoundParams::from_model(const ModelSpec& model, double eta0_star) {
  BoundParams b;
  b.lip_omega = model.omega.lipschitz();
  b.lip_d = model.coupling_d.lipschitz();
  b.lip_h = model.coupling_h.lipschitz();
  b.sup_d = model.coupling_d.sup_norm();
  b.eta_star = eta0_star + model.coupling_h.sup_norm();
  b.epsilon = model.epsilon;
  return b;
}

namespace {

struct RunSetup {
  SystemState initial;
  int stride = 1;
};

RunSetup discretized_run(const Kernel& kernel,
                         const std::function<double(double)>& phi0,
                         const ModelSpec& model, int n, double dt,
                         double snapshot_interval, int quad_subsamples) {
  const Partition p(n);
  auto phases = discretize_phases(phi0, p, quad_subsamples);
  auto weights = discretize_weights_average(kernel, p, quad_subsamples);
  RunSetup setup;
  setup.initial =
      SystemState(model.t0, std::move(phases.phases), std::move(weights.weights));
  const double stride_real = snapshot_interval / dt;
  setup.stride = static_cast<int>(std::llround(stride_real));
  if (setup.stride < 1 || std::abs(setup.stride * dt - snapshot_interval) >
                              1e-9 * std::max(1.0, snapshot_interval))
    throw std::invalid_argument(
        "self_convergence_study: snapshot interval must be a multiple of dt");
  return setup;
}

}  // namespace

ConvergenceReport self_convergence_study(const Kernel& kernel,
                                         const std::function<double(double)>& phi0,
                                         const ModelSpec& model,
                                         const std::vector<int>& ns, int n_ref,
                                         double dt, double dt_ref, int stride_ref,
                                         int quad_subsamples) {
  if (ns.empty()) throw std::invalid_argument("self_convergence_study: empty Ns");
  if (stride_ref < 1) throw std::invalid_argument("stride_ref must be >= 1");
  for (size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 1 || n_ref % ns[k] != 0)
      throw std::invalid_argument("every n must divide n_ref");
    if (k > 0 && ns[k] <= ns[k - 1])
      throw std::invalid_argument("Ns must be strictly increasing");
  }

  const auto assumptions = check_assumptions(kernel, model, phi0);
  if (!assumptions.all_pass())
    throw std::runtime_error("self_convergence_study: assumption check failed\n" +
                             assumptions.summary());

  const double snapshot_interval = stride_ref * dt_ref;

  ConvergenceReport report;
  report.model_id = model.describe();
  report.n_ref = n_ref;
  report.dt_ref = dt_ref;
  report.snapshot_interval = snapshot_interval;

  // coarse runs fan out; the reference run dominates and keeps the main thread
  std::vector<std::future<LiftedTrajectory>> coarse;
  coarse.reserve(ns.size());
  for (int n : ns) {
    coarse.push_back(std::async(std::launch::async, [&, n]() {
      auto setup = discretized_run(kernel, phi0, model, n, dt, snapshot_interval,
                                   quad_subsamples);
      return lift(integrate(setup.initial, model, dt, setup.stride, quad_subsamples));
    }));
  }

  auto ref_setup = discretized_run(kernel, phi0, model, n_ref, dt_ref,
                                   snapshot_interval, quad_subsamples);
  const auto reference =
      lift(integrate(ref_setup.initial, model, dt_ref, ref_setup.stride,
                     quad_subsamples));

  for (size_t k = 0; k < ns.size(); ++k) {
    const auto lifted = coarse[k].get();
    ConvergenceRecord rec;
    rec.n = ns[k];
    rec.dt = dt;
    rec.error = d_interval_infty(lifted, reference);
    report.records.push_back(rec);
  }

  report.monotone = true;
  for (size_t k = 0; k + 1 < report.records.size(); ++k) {
    const double e0 = report.records[k].error;
    const double e1 = report.records[k + 1].error;
    if (!(e1 < e0)) report.monotone = false;
    if (e0 > report.degenerate_floor && e1 > report.degenerate_floor)
      report.rates.push_back(std::log2(e0 / e1));
    else
      report.rates.push_back(std::nullopt);
  }
  return report;
}

PositivityReport positivity_monitor(const Trajectory& traj, const ModelSpec& model) {
  if (traj.states.empty())
    throw std::invalid_argument("positivity_monitor: empty trajectory");
  PositivityReport report;
  report.inf_w0 = traj.initial().min_weight();
  report.threshold =
      positivity_threshold(model.coupling_h, model.epsilon, model.horizon);
  report.condition_held = report.inf_w0 >= report.threshold;

  report.min_weight = traj.initial().min_weight();
  report.min_weight_time = traj.times.front();
  for (size_t k = 0; k < traj.size(); ++k) {
    const double m = traj.states[k].min_weight();
    if (m < report.min_weight) {
      report.min_weight = m;
      report.min_weight_time = traj.times[k];
    }
  }
  report.claim_holds = !report.condition_held || report.min_weight > 0.0;
  return report;
}

namespace {

GronwallReport envelope_check(const Trajectory& a, const Trajectory& b,
                              const BoundParams& bounds, double scale,
                              double rel_slack) {
  if (a.size() != b.size() || a.n != b.n)
    throw std::invalid_argument("gronwall check: runs must share grid and size");

  const auto la = lift(a);
  const auto lb = lift(b);
  const auto series = d_infty_series(la, lb);

  GronwallReport report;
  report.c1 = bounds.c1();
  report.envelope_scale = scale;
  report.rel_slack = rel_slack;
  report.snapshots = series.size();
  report.pass = true;
  report.tightest_margin = std::numeric_limits<double>::infinity();
  report.tightest_time = a.times.front();
  report.max_ratio = 0.0;

  const double t0 = a.times.front();
  for (size_t k = 0; k < series.size(); ++k) {
    const double observed = series[k].total();
    const double bound =
        scale * std::exp(report.c1 * (a.times[k] - t0)) * (1.0 + rel_slack);
    const double margin = bound - observed;
    if (margin < report.tightest_margin) {
      report.tightest_margin = margin;
      report.tightest_time = a.times[k];
    }
    if (bound > 0.0)
      report.max_ratio = std::max(report.max_ratio, observed / bound);
    else if (observed > 0.0)
      report.max_ratio = std::numeric_limits<double>::infinity();
    if (observed > bound) report.pass = false;
  }
  return report;
}

}  // namespace

GronwallReport gronwall_ic_check(const Trajectory& base, const Trajectory& perturbed,
                                 const BoundParams& bounds, double rel_slack) {
  const auto d0 = d_infty(
      lift_phases(base.initial().phases, Partition(base.n)),
      lift_weights(base.initial().weights, Partition(base.n)),
      lift_phases(perturbed.initial().phases, Partition(perturbed.n)),
      lift_weights(perturbed.initial().weights, Partition(perturbed.n)));
  return envelope_check(base, perturbed, bounds, d0.total(), rel_slack);
}

GronwallReport gronwall_omega_check(const Trajectory& base,
                                    const Trajectory& modified,
                                    const BoundParams& bounds, double horizon,
                                    double omega_diff_sup, double rel_slack) {
  if (base.initial().phases != modified.initial().phases ||
      base.initial().weights != modified.initial().weights)
    throw std::invalid_argument("gronwall_omega_check: initial data must coincide");
  return envelope_check(base, modified, bounds, horizon * omega_diff_sup, rel_slack);
}

}  // namespace coevo
