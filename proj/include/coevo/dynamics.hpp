#pragma once

#include <span>
#include <vector>

#include "coevo/model.hpp"

namespace coevo {

// Phases (real lifts) and the dense weight matrix at one instant.
struct SystemState {
  double t = 0.0;
  std::vector<double> phases;   // n
  std::vector<double> weights;  // n*n row-major

  SystemState() = default;
  SystemState(double t_, std::vector<double> phases_, std::vector<double> weights_);

  int n() const { return static_cast<int>(phases.size()); }
  double weight(int i, int j) const {
    return weights[static_cast<size_t>(i) * n() + j];
  }
  bool finite() const;
  double min_weight() const;
  double max_abs_weight() const;
};

// Sampled solution of the coupled phase/weight system.
struct Trajectory {
  ModelSpec model;
  int n = 0;
  std::vector<double> times;        // strictly increasing, times[0] = t0
  std::vector<SystemState> states;  // states[k].t == times[k]

  const SystemState& initial() const { return states.front(); }
  const SystemState& final_state() const { return states.back(); }
  size_t size() const { return times.size(); }
};

// Right-hand side of the coupled system:
//   dphi_i = omega_i + (1/n) sum_j W_ij D(phi_i, phi_j)
//   dW_ij  = -eps (W_ij + H(phi_i, phi_j))
// cell_omegas holds the discretized per-cell frequencies (constant in phi, t
// for the families implemented here).
void rhs(const SystemState& state, const ModelSpec& model,
         std::span<const double> cell_omegas, std::span<double> dphases,
         std::span<double> dweights);

// Classical fixed-step RK4 on the monolithic (phases + weights) system.
// Snapshots every sample_stride steps plus the final time. dt must divide the
// horizon within rounding slack; a non-finite state aborts with a diagnostic.
// Frequencies are discretized internally from model.omega.
Trajectory integrate(const SystemState& initial, const ModelSpec& model, double dt,
                     int sample_stride, int quad_subsamples = 4);

// Integrating-factor form of the weight equation:
//   W_ij(t) = e^(-eps (t-t0)) W_ij(t0)
//             - eps * int_t0^t e^(-eps (t-tau)) H(phi_i(tau), phi_j(tau)) dtau
// evaluated at the final time of phase_history with trapezoid quadrature on
// its snapshot grid (use stride 1 histories for full accuracy).
std::vector<double> weights_exact_update(const std::vector<double>& w0,
                                         const Trajectory& phase_history,
                                         const ModelSpec& model);

// Closed-form solution on the synchronized manifold (all phases equal, all
// weights equal), valid for constant frequency and sine-lag couplings:
//   w(t)   = (w0 + sb) e^(-eps (t-t0)) - sb
//   phi(t) = phi0 + omega (t-t0)
//            + sa [ (w0+sb) (1-e^(-eps (t-t0)))/eps - sb (t-t0) ]
// with sa = amp_D sin(a), sb = amp_H sin(b); the eps -> 0 limit is taken
// analytically.
struct ManifoldPoint {
  double phi = 0.0;
  double w = 0.0;
};
ManifoldPoint sync_manifold_solution(double phi0, double w0, const ModelSpec& model,
                                     double t);

// One application of the solution operator to a candidate trajectory on a
// fixed grid: the integral form of the dynamics, trapezoid in time and exact
// cell sums in space. Preserves the initial condition.
Trajectory picard_apply(const Trajectory& candidate, const SystemState& initial,
                        const ModelSpec& model, std::span<const double> cell_omegas);

struct PicardStats {
  double m3 = 0.0;             // contraction constant from model metadata
  double window_length = 0.0;  // chosen so m3 * window <= 1/2
  int windows = 0;
  int max_applications = 0;  // worst window; last application verifies the fix point
  int total_applications = 0;
};

struct PicardResult {
  Trajectory trajectory;
  PicardStats stats;
};

// Time-marching successive approximation: splits the horizon into windows on
// which the operator contracts (factor <= 1/2 by the M3 bound), iterates each
// window until successive iterates differ by less than tol in the
// time-uniform metric, and chains the windows. On max_iter exhaustion the
// window is halved and retried once before a std::runtime_error reporting M3
// and the window.
PicardResult picard_solve(const SystemState& initial, const ModelSpec& model,
                          double dt, double tol, int max_iter = 64,
                          int quad_subsamples = 4);

}  // namespace coevo
