#include "coevo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coevo {

namespace {

constexpr long long kMaxRefinement = 1 << 21;

int common_refinement(int n1, int n2) {
  const long long l = std::lcm<long long>(n1, n2);
  if (l > kMaxRefinement)
    throw std::invalid_argument("no affordable common refinement of partitions");
  return static_cast<int>(l);
}

bool constant_blocks(const StepGraphon& g, int coarse_n) {
  const int r = g.partition.n / coarse_n;
  for (int i = 0; i < g.partition.n; ++i)
    for (int j = 0; j < g.partition.n; ++j)
      if (g.at(i, j) != g.at((i / r) * r, (j / r) * r)) return false;
  return true;
}

// Coarsest exact representation of the step function: block-constant
// refinements collapse back, which keeps the TV arithmetic (and hence the
// refinement-invariance identity) bit-exact.
StepGraphon canonical(const StepGraphon& g) {
  const int n = g.partition.n;
  for (int coarse = 1; coarse < n; ++coarse) {
    if (n % coarse != 0) continue;
    if (!constant_blocks(g, coarse)) continue;
    const int r = n / coarse;
    std::vector<double> w(static_cast<size_t>(coarse) * coarse);
    for (int i = 0; i < coarse; ++i)
      for (int j = 0; j < coarse; ++j)
        w[static_cast<size_t>(i) * coarse + j] = g.at(i * r, j * r);
    return StepGraphon(Partition(coarse), std::move(w));
  }
  return g;
}

}  // namespace

double phase_sup_distance(const PhaseField& f, const PhaseField& g) {
  const int n1 = f.partition.n, n2 = g.partition.n;
  const int m = common_refinement(n1, n2);
  const int r1 = m / n1, r2 = m / n2;
  double worst = 0.0;
  for (int k = 0; k < m; ++k)
    worst = std::max(worst, torus_distance(f.phases[k / r1], g.phases[k / r2]));
  return worst;
}

double tv_step_distance(const StepGraphon& raw1, const StepGraphon& raw2) {
  const StepGraphon g1 = canonical(raw1);
  const StepGraphon g2 = canonical(raw2);
  const int n1 = g1.partition.n, n2 = g2.partition.n;
  const int m = common_refinement(n1, n2);
  const int r1 = m / n1, r2 = m / n2;
  double worst = 0.0;
  // rows repeat within a block; visiting each distinct (row1,row2) pair once
  for (int i = 0; i < m; i += 1) {
    const int i1 = i / r1, i2 = i / r2;
    double row = 0.0;
    for (int j = 0; j < m; ++j) row += std::abs(g1.at(i1, j / r1) - g2.at(i2, j / r2));
    worst = std::max(worst, row / m);
    // skip to the next boundary where either row index changes
    const int next = std::min((i1 + 1) * r1, (i2 + 1) * r2);
    i = next - 1;
  }
  return worst;
}

DistanceBreakdown d_infty(const PhaseField& f1, const StepGraphon& g1,
                          const PhaseField& f2, const StepGraphon& g2) {
  DistanceBreakdown out;
  out.phase_part = phase_sup_distance(f1, f2);
  out.weight_part = tv_step_distance(g1, g2);
  return out;
}

LiftedTrajectory lift(const Trajectory& traj) {
  LiftedTrajectory out;
  out.times = traj.times;
  out.states.reserve(traj.states.size());
  const Partition p(traj.n);
  for (const auto& s : traj.states)
    out.states.push_back(LiftedState{lift_phases(s.phases, p), lift_weights(s.weights, p)});
  return out;
}

std::vector<DistanceBreakdown> d_infty_series(const LiftedTrajectory& a,
                                              const LiftedTrajectory& b,
                                              double time_slack) {
  if (a.size() != b.size())
    throw std::invalid_argument("d_interval_infty: snapshot counts differ");
  std::vector<DistanceBreakdown> out;
  out.reserve(a.size());
  for (size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > time_slack)
      throw std::invalid_argument("d_interval_infty: snapshot times mismatch");
    out.push_back(
        d_infty(a.states[k].phases, a.states[k].weights, b.states[k].phases,
                b.states[k].weights));
  }
  return out;
}

double d_interval_infty(const LiftedTrajectory& a, const LiftedTrajectory& b,
                        double time_slack) {
  double worst = 0.0;
  for (const auto& d : d_infty_series(a, b, time_slack))
    worst = std::max(worst, d.total());
  return worst;
}

OrderParameter order_parameter(std::span<const double> phases) {
  if (phases.empty())
    throw std::invalid_argument("order_parameter: need at least one phase");
  double c = 0.0, s = 0.0;
  for (double phi : phases) {
    c += std::cos(phi);
    s += std::sin(phi);
  }
  c /= static_cast<double>(phases.size());
  s /= static_cast<double>(phases.size());
  OrderParameter out;
  out.r = std::hypot(c, s);
  out.psi = TorusAngle{std::atan2(s, c)};
  return out;
}

}  // namespace coevo
