#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coevo/dynamics.hpp"
#include "coevo/graphon.hpp"
#include "coevo/metrics.hpp"

namespace coevo {

// Ingredients of the continuous-dependence constant
//   C1 = Lip(omega) + 2 Lip(D) ||eta||* + 2 eps Lip(H) + eps + ||D||_inf.
// c1() recomputes from the stored fields, never cached.
struct BoundParams {
  double lip_omega = 0.0;
  double lip_d = 0.0;
  double lip_h = 0.0;
  double sup_d = 0.0;
  double eta_star = 0.0;  // bound on ||eta||* along the trajectory
  double epsilon = 0.0;

  double c1() const {
    return lip_omega + 2.0 * lip_d * eta_star + 2.0 * epsilon * lip_h + epsilon +
           sup_d;
  }

  // eta_star from the a-priori bound ||eta_0||* + ||H||_inf
  static BoundParams from_model(const ModelSpec& model, double eta0_star);
};

struct ConvergenceRecord {
  int n = 0;
  double dt = 0.0;
  double error = 0.0;  // d_{T,inf} against the reference run
};

struct ConvergenceReport {
  std::string model_id;
  int n_ref = 0;
  double dt_ref = 0.0;
  double snapshot_interval = 0.0;
  std::vector<ConvergenceRecord> records;  // n strictly increasing
  bool monotone = false;                   // errors strictly decreasing
  // log2(error[k]/error[k+1]) per successive pair; empty optional when either
  // error sits below the degeneracy floor
  std::vector<std::optional<double>> rates;
  double degenerate_floor = 1e-12;
};

// Self-convergence study: integrates at every n in Ns and at n_ref, lifts all
// runs to step functions, refines to the reference partition and measures
// d_{T,inf} at the shared snapshot schedule (stride_ref reference steps).
// Every n must divide n_ref and the snapshot interval must be a multiple of
// dt. Aborts with std::runtime_error carrying the validation report when the
// standing assumptions fail.
ConvergenceReport self_convergence_study(const Kernel& kernel,
                                         const std::function<double(double)>& phi0,
                                         const ModelSpec& model,
                                         const std::vector<int>& ns, int n_ref,
                                         double dt, double dt_ref, int stride_ref,
                                         int quad_subsamples = 4);

struct PositivityReport {
  double inf_w0 = 0.0;      // min initial weight
  double threshold = 0.0;   // ||H||_inf (e^(eps T) - 1)
  bool condition_held = false;
  double min_weight = 0.0;  // over all snapshots and entries
  double min_weight_time = 0.0;
  // the conditional claim: min_weight > 0 whenever condition_held
  bool claim_holds = true;
};

PositivityReport positivity_monitor(const Trajectory& traj, const ModelSpec& model);

struct GronwallReport {
  double c1 = 0.0;
  double envelope_scale = 0.0;  // d_inf(t0) or T ||omega - omega~||_inf
  double rel_slack = 0.0;
  bool pass = false;
  double tightest_margin = 0.0;  // min over snapshots of bound - observed
  double tightest_time = 0.0;
  double max_ratio = 0.0;        // max over snapshots of observed / bound
  size_t snapshots = 0;
};

// Prop-style continuous dependence on the initial conditions:
//   d_inf(t) <= d_inf(t0) e^(C1 (t-t0)) (1 + slack)  at every snapshot.
// Both runs must share model and snapshot schedule.
GronwallReport gronwall_ic_check(const Trajectory& base, const Trajectory& perturbed,
                                 const BoundParams& bounds, double rel_slack = 1e-9);

// Continuous dependence on the frequency:
//   d_inf(t) <= T ||omega - omega~||_inf e^(C1 (t-t0)) (1 + slack).
// Identical initial data required; omega_diff_sup = ||omega - omega~||_inf.
GronwallReport gronwall_omega_check(const Trajectory& base,
                                    const Trajectory& modified,
                                    const BoundParams& bounds, double horizon,
                                    double omega_diff_sup, double rel_slack = 1e-9);

}  // namespace coevo
