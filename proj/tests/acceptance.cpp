// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Configurations and tolerances are pinned in code; every expected value is
// produced by an analytic oracle, a dual solver, or a property that must hold
// along the run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "coevo/analysis.hpp"
#include "coevo/dynamics.hpp"
#include "coevo/graphon.hpp"
#include "coevo/metrics.hpp"

using namespace coevo;

namespace {

int g_failures = 0;

class Criterion {
 public:
  explicit Criterion(int index, std::string name)
      : index_(index), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      failed_details_ += (failed_details_.empty() ? "" : "; ") + what;
    }
  }

  bool ok() const { return failed_details_.empty(); }

  void finish(double budget_seconds) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    if (budget_seconds > 0.0 && seconds > budget_seconds)
      expect(false, "runtime " + std::to_string(seconds) + " s over budget " +
                        std::to_string(budget_seconds) + " s");
    const bool pass = failed_details_.empty();
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL",
                index_, name_.c_str(), seconds,
                pass ? "" : " -- ", failed_details_.c_str());
    std::fflush(stdout);
  }

 private:
  int index_;
  std::string name_;
  std::string failed_details_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// 1. Closed-form sync-manifold solution vs RK4 at every snapshot.
void criterion_sync_manifold() {
  Criterion c(1, "sync-manifold analytic oracle");
  const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 5.0);
  const int n = 16;
  const SystemState initial(0.0, std::vector<double>(n, 0.5),
                            std::vector<double>(static_cast<size_t>(n) * n, 1.0));
  const auto traj = integrate(initial, model, 1e-3, 50);

  double max_phi = 0.0, max_w = 0.0;
  for (size_t k = 0; k < traj.size(); ++k) {
    const auto exact = sync_manifold_solution(0.5, 1.0, model, traj.times[k]);
    for (double phi : traj.states[k].phases)
      max_phi = std::max(max_phi, std::abs(phi - exact.phi));
    for (double w : traj.states[k].weights)
      max_w = std::max(max_w, std::abs(w - exact.w));
  }
  c.expect(max_phi <= 1e-6, "max phase error " + fmt(max_phi) + " > 1e-6");
  c.expect(max_w <= 1e-6, "max weight error " + fmt(max_w) + " > 1e-6");
  c.finish(1.0);
}

// 2. Integrating-factor weight formula vs RK4 on a frozen-phase run.
void criterion_integrating_factor() {
  Criterion c(2, "integrating-factor weight oracle");
  // D amplitude 0 and omega = 0 freeze the phases exactly
  const ModelSpec model(CouplingSpec::sine_lag(0.0, 0.0),
                        CouplingSpec::sine_lag(1.0, 0.7),
                        FrequencySpec::constant(0.0), 0.01, 0.0, 10.0);
  const int n = 16;
  const Partition p(n);
  auto phases = discretize_phases([](double x) { return kTwoPi * x; }, p);
  auto weights = discretize_weights_average(Kernel::constant(1.0), p);
  const SystemState initial(0.0, phases.phases, weights.weights);

  const auto traj = integrate(initial, model, 1e-3, 1);
  const auto exact = weights_exact_update(initial.weights, traj, model);
  double diff = 0.0;
  const auto& rk4 = traj.final_state().weights;
  for (size_t m = 0; m < exact.size(); ++m)
    diff = std::max(diff, std::abs(exact[m] - rk4[m]));
  c.expect(diff <= 1e-8, "per-entry gap " + fmt(diff) + " > 1e-8");
  c.finish(1.0);
}

// 3+4. Self-convergence against the n_ref=512 reference, plus the positivity
// clause on the same configuration.
void criterion_convergence_and_positivity() {
  const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 4.0);
  const auto kernel = Kernel::cosine_shift(1.0, 0.5);
  const auto phi0 = [](double x) { return kTwoPi * x; };

  {
    Criterion c(3, "self-convergence vs n_ref=512");
    ConvergenceReport report;
    try {
      report = self_convergence_study(kernel, phi0, model, {8, 16, 32, 64, 128},
                                      512, 2e-3, 5e-4, 200);
      c.expect(report.monotone, "errors not strictly decreasing");
      const double ratio =
          report.records.back().error / report.records.front().error;
      c.expect(ratio < 0.25,
               "error(128)/error(8) = " + fmt(ratio) + " >= 0.25");
    } catch (const std::exception& e) {
      c.expect(false, e.what());
    }
    c.finish(60.0);
  }

  {
    Criterion c(4, "positivity under the threshold condition");
    const int n = 128;
    const Partition p(n);
    auto phases = discretize_phases(phi0, p);
    auto weights = discretize_weights_average(kernel, p);
    const SystemState initial(0.0, phases.phases, weights.weights);
    const auto traj = integrate(initial, model, 2e-3, 100);
    const auto report = positivity_monitor(traj, model);

    c.expect(report.condition_held,
             "inf W0 " + fmt(report.inf_w0) + " below threshold " +
                 fmt(report.threshold));
    c.expect(report.min_weight > 0.0,
             "min weight " + fmt(report.min_weight) + " not positive");
    const double horizon = berner_horizon_bound(0.5, 0.05);
    c.expect(model.horizon < horizon,
             "T=4 not below the sine-model horizon " + fmt(horizon));
    c.expect(std::abs(horizon - 8.1093021621632877) < 1e-9,
             "horizon bound off: " + fmt(horizon));
    c.finish(0.0);
  }
}

// 5. Gronwall envelopes for initial-condition and frequency perturbations.
void criterion_gronwall() {
  Criterion c(5, "Gronwall continuous-dependence envelopes");
  const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 4.0);
  const auto kernel = Kernel::cosine_shift(1.0, 0.5);
  const int n = 32;
  const Partition p(n);
  const auto weights = discretize_weights_average(kernel, p);
  const auto base_phases =
      discretize_phases([](double x) { return kTwoPi * x; }, p);
  const auto pert_phases = discretize_phases(
      [](double x) { return kTwoPi * x + 1e-3 * std::sin(kTwoPi * x); }, p);

  const auto bounds = BoundParams::from_model(model, weights.max_fiber_tv());
  const SystemState base_ic(0.0, base_phases.phases, weights.weights);
  const SystemState pert_ic(0.0, pert_phases.phases, weights.weights);

  const auto base = integrate(base_ic, model, 2e-3, 50);
  const auto pert = integrate(pert_ic, model, 2e-3, 50);
  const auto ic_report = gronwall_ic_check(base, pert, bounds, 1e-9);
  c.expect(ic_report.pass, "initial-condition envelope violated (max ratio " +
                               fmt(ic_report.max_ratio) + ")");

  const auto shifted = make_berner(1.01, 0.3, 0.7, 0.05, 0.0, 4.0);
  const auto modified = integrate(base_ic, shifted, 2e-3, 50);
  const double sup = frequency_sup_difference(model.omega, shifted.omega);
  const auto om_report =
      gronwall_omega_check(base, modified, bounds, model.horizon, sup, 1e-9);
  c.expect(std::abs(sup - 0.01) < 1e-12, "omega sup difference " + fmt(sup));
  c.expect(om_report.pass, "frequency envelope violated (max ratio " +
                               fmt(om_report.max_ratio) + ")");
  c.finish(5.0);
}

// 6. Picard fixed-point solver vs RK4 on a small instance.
void criterion_picard() {
  Criterion c(6, "Picard operator vs RK4");
  const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 0.5);
  const int n = 8;
  const Partition p(n);
  auto phases = discretize_phases([](double x) { return kTwoPi * x; }, p);
  auto weights = discretize_weights_average(Kernel::cosine_shift(1.0, 0.5), p);
  const SystemState initial(0.0, phases.phases, weights.weights);

  try {
    const auto result = picard_solve(initial, model, 1e-3, 1e-6);
    const auto rk4 = integrate(initial, model, 1e-3, 1);
    const double d = d_interval_infty(lift(result.trajectory), lift(rk4));
    c.expect(d <= 1e-5, "d_T,inf(picard, rk4) = " + fmt(d) + " > 1e-5");
    const int bound = static_cast<int>(std::log(1e-6) / std::log(0.5)) + 1;
    c.expect(result.stats.max_applications - 1 <= bound,
             "window corrections " + std::to_string(result.stats.max_applications - 1) +
                 " exceed the contraction bound " + std::to_string(bound));
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  c.finish(10.0);
}

// 7. Metric and dynamics invariants on randomized small configurations.
void criterion_property_suite() {
  Criterion c(7, "metric/refinement invariant suite (100 random configs)");
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> par(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int rep = 0; rep < 100 && c.ok(); ++rep) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const size_t nn = static_cast<size_t>(n) * n;

    auto random_graphon = [&]() {
      std::vector<double> w(nn);
      for (auto& x : w) x = 2.0 * par(rng);
      return StepGraphon(Partition(n), std::move(w));
    };
    const auto ga = random_graphon();
    const auto gb = random_graphon();
    const auto gc = random_graphon();

    // TV pseudometric axioms
    const double dab = tv_step_distance(ga, gb);
    c.expect(dab >= 0.0, "tv negative");
    c.expect(dab == tv_step_distance(gb, ga), "tv asymmetric");
    c.expect(dab <= tv_step_distance(ga, gc) + tv_step_distance(gc, gb) + 1e-12,
             "tv triangle inequality violated");
    c.expect(tv_step_distance(ga, ga) == 0.0, "tv(a,a) != 0");

    // refinement invariance, exact
    const int mult = 2 + static_cast<int>(rng() % 3);
    c.expect(tv_step_distance(refine(ga, n * mult), refine(gb, n * mult)) == dab,
             "tv changed under refinement");

    // order parameter rotation invariance
    std::vector<double> phs(n);
    for (auto& x : phs) x = kTwoPi * unit(rng);
    const double r0 = order_parameter(phs).r;
    const double shift = kTwoPi * unit(rng);
    for (auto& x : phs) x += shift;
    c.expect(std::abs(order_parameter(phs).r - r0) <= 1e-12,
             "order parameter not rotation invariant");

    // dynamics invariants on a short random run
    const auto model = make_berner(par(rng), par(rng), par(rng),
                                   0.5 * std::abs(par(rng)), 0.0, 0.5);
    std::vector<double> phases(n), weights(nn);
    for (auto& x : phases) x = kTwoPi * unit(rng);
    for (auto& x : weights) x = 2.0 * par(rng);
    const SystemState initial(0.0, phases, weights);
    const double apriori =
        initial.max_abs_weight() + model.coupling_h.sup_norm();
    const auto traj = integrate(initial, model, 1e-2, 10);

    // d_T,inf dominates every snapshot's d_inf against a second run
    auto other_ic = initial;
    other_ic.phases[0] += unit(rng);
    const auto lifted = lift(traj);
    const auto lifted_other = lift(integrate(other_ic, model, 1e-2, 10));
    const double sup_d = d_interval_infty(lifted, lifted_other);
    for (const auto& snap : d_infty_series(lifted, lifted_other))
      c.expect(sup_d >= snap.total() - 1e-15, "d_T,inf below a snapshot d_inf");

    for (const auto& s : traj.states)
      c.expect(s.max_abs_weight() <= apriori * (1.0 + 1e-12),
               "a-priori weight bound violated");
  }
  c.finish(30.0);
}

}  // namespace

int main() {
  criterion_sync_manifold();
  criterion_integrating_factor();
  criterion_convergence_and_positivity();
  criterion_gronwall();
  criterion_picard();
  criterion_property_suite();

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
