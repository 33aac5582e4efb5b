#pragma once

#include <functional>
#include <string>
#include <vector>

#include "coevo/model.hpp"

namespace coevo {

// Uniform partition of X = [0,1] into n half-open cells [(i-1)/n, i/n);
// the last cell is closed so point lookup is total on [0,1].
struct Partition {
  int n = 1;

  explicit Partition(int n_);

  double cell_lower(int i) const { return static_cast<double>(i) / n; }
  double cell_upper(int i) const { return static_cast<double>(i + 1) / n; }
  double midpoint(int i) const { return (i + 0.5) / n; }
  double cell_measure() const { return 1.0 / n; }

  // throws std::out_of_range for x outside [0,1]
  int cell_index(double x) const;

  bool operator==(const Partition&) const = default;
};

// Continuum graphon kernel W(x,y) on [0,1]^2 with inf/sup metadata. The
// closed families carry analytic bounds; tabulated and custom kernels carry
// grid/sample minima (see check_assumptions for the sampled-inf caveat).
class Kernel {
 public:
  enum class Family { kConstant, kCosineShift, kProduct, kTabulated, kCustom };

  static Kernel constant(double c);
  // base + amplitude * cos(2*pi*(x - y))
  static Kernel cosine_shift(double base, double amplitude);
  // offset + scale * x * y
  static Kernel product(double scale, double offset = 0.0);
  // n x n row-major cell values; bilinear between cell midpoints, clamped at
  // the boundary, so the evaluator is continuous on [0,1]^2
  static Kernel tabulated(std::vector<double> values, int grid_n);
  // arbitrary evaluator with caller-supplied bounds
  static Kernel custom(std::function<double(double, double)> f, double inf_bound,
                       double sup_bound);

  double operator()(double x, double y) const { return eval_(x, y); }

  Family family() const { return family_; }
  double inf_bound() const { return inf_bound_; }
  double sup_bound() const { return sup_bound_; }
  // true when inf/sup are analytic rather than grid/sample minima
  bool certified_bounds() const { return certified_; }

 private:
  Kernel() = default;

  Family family_ = Family::kConstant;
  std::function<double(double, double)> eval_;
  double inf_bound_ = 0.0;
  double sup_bound_ = 0.0;
  bool certified_ = false;
};

// Step-function weight field on a uniform partition: row i is the fiber
// density of the measure eta^x (w.r.t. Lebesgue) for x in cell i.
struct StepGraphon {
  Partition partition{1};
  std::vector<double> weights;  // n*n row-major

  StepGraphon(Partition p, std::vector<double> w);

  double at(int i, int j) const {
    return weights[static_cast<size_t>(i) * partition.n + j];
  }
  double& at(int i, int j) {
    return weights[static_cast<size_t>(i) * partition.n + j];
  }

  // (1/n) * sum_j weights[i][j] — total mass of the fiber over cell i
  double fiber_mass(int i) const;
  // (1/n) * sum_j |weights[i][j]| — TV norm of the fiber measure
  double fiber_tv(int i) const;
  // sup_x ||eta^x||_TV for the step family = max over rows
  double max_fiber_tv() const;
  double min_entry() const;
  double max_abs_entry() const;
};

// Step-function phase field: one real lift per cell.
struct PhaseField {
  Partition partition{1};
  std::vector<double> phases;

  PhaseField(Partition p, std::vector<double> values);

  // value of the step function at x; throws outside [0,1]
  double eval_at(double x) const { return phases[partition.cell_index(x)]; }
};

// Per-cell frequencies omega_i = n * integral of omega over cell i. Exact for
// constant/affine/partition-aligned tabulated families, composite midpoint
// quadrature with `subsamples` points per cell otherwise.
std::vector<double> discretize_frequencies(const FrequencySpec& omega,
                                           const Partition& p, int subsamples = 4);

// Cell-pair averages W_ij = n^2 * integral of W over cell_i x cell_j,
// composite midpoint rule with subsamples^2 points per rectangle (exact for
// kernels affine in each variable).
StepGraphon discretize_weights_average(const Kernel& k, const Partition& p,
                                       int subsamples = 4);

// Midpoint sampling W_ij = W((i-1/2)/n, (j-1/2)/n).
StepGraphon discretize_weights_sample(const Kernel& k, const Partition& p);

// Cell averages of a continuous initial phase lift.
PhaseField discretize_phases(const std::function<double(double)>& phi0,
                             const Partition& p, int subsamples = 4);

// Lifts of finite tuples to step functions on the partition.
PhaseField lift_phases(std::vector<double> values, const Partition& p);
StepGraphon lift_weights(std::vector<double> weights, const Partition& p);

// Block replication onto the finer uniform partition with m cells
// (m must be a multiple of the current n); represents the same measure family.
StepGraphon refine(const StepGraphon& g, int m);
PhaseField refine(const PhaseField& f, int m);

// ||H||_inf * (e^(eps*T) - 1): the initial-density floor that guarantees the
// evolving weights stay positive on [t0, t0+T].
double positivity_threshold(const CouplingSpec& h, double epsilon, double T);

// Largest horizon (1/eps)*ln(1 + c_w) with guaranteed positivity for the
// sine-coupled model; +infinity when epsilon == 0. Requires c_w > 0.
double berner_horizon_bound(double c_w, double epsilon);

struct AssumptionCheck {
  std::string id;      // "A1".."A7"
  std::string what;
  bool pass = false;
  double margin = 0.0;  // positive = slack, negative = violation
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  int sample_density = 0;

  bool all_pass() const;
  // regularity = everything except the positivity floor A5
  bool regularity_pass() const;
  const AssumptionCheck& find(const std::string& id) const;
  std::string summary() const;
};

// Samples the model and kernel against the standing assumptions: Lipschitz
// soundness of D/H/omega (A1-A3), continuity of the initial data (A4, A6)
// via a two-resolution modulus test, the positivity floor inf W vs
// ||H||_inf*(e^(eps*T)-1) (A5), and partition uniformity (A7). Failures are
// reported, never thrown. phi0 may be null (A4 then covers the kernel only).
AssumptionReport check_assumptions(const Kernel& k, const ModelSpec& model,
                                   const std::function<double(double)>& phi0 = {},
                                   int sample_density = 64);

}  // namespace coevo
