#pragma once

#include <span>
#include <vector>

#include "coevo/dynamics.hpp"
#include "coevo/graphon.hpp"

namespace coevo {

// d_inf split into its two summands.
struct DistanceBreakdown {
  double phase_part = 0.0;   // sup over x of the torus distance
  double weight_part = 0.0;  // sup over x of the fiber TV distance
  double total() const { return phase_part + weight_part; }
};

// sup-distance of two step phase fields: max over cells of the torus
// distance on the common refinement. Throws when no affordable common
// refinement exists.
double phase_sup_distance(const PhaseField& f, const PhaseField& g);

// sup over x of the total variation distance between the fiber measures,
// which for step densities is the exact row sum max_i (1/m) sum_j |dW_ij|
// on the common refinement.
double tv_step_distance(const StepGraphon& g1, const StepGraphon& g2);

DistanceBreakdown d_infty(const PhaseField& f1, const StepGraphon& g1,
                          const PhaseField& f2, const StepGraphon& g2);

// A trajectory snapshot lifted to step functions on the uniform partition.
struct LiftedState {
  PhaseField phases;
  StepGraphon weights;
};

struct LiftedTrajectory {
  std::vector<double> times;
  std::vector<LiftedState> states;

  size_t size() const { return times.size(); }
};

LiftedTrajectory lift(const Trajectory& traj);

// Time-uniform metric: sup over shared snapshot times of d_inf. Requires the
// two snapshot schedules to agree within the slack.
double d_interval_infty(const LiftedTrajectory& a, const LiftedTrajectory& b,
                        double time_slack = 1e-9);

// Per-snapshot breakdowns (same schedule requirements); used by reports.
std::vector<DistanceBreakdown> d_infty_series(const LiftedTrajectory& a,
                                              const LiftedTrajectory& b,
                                              double time_slack = 1e-9);

// r e^(i psi) = (1/n) sum_j e^(i phi_j); r in [0,1] measures coherence.
struct OrderParameter {
  double r = 0.0;
  TorusAngle psi;
};

OrderParameter order_parameter(std::span<const double> phases);

}  // namespace coevo
