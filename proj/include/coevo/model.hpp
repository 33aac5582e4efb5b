#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace coevo {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Geodesic distance on the circle R/(2*pi*Z); result lies in [0, pi].
double torus_distance(double u, double v);

// Canonical representative of a real lift in [0, 2*pi).
double wrap_angle(double lift);

// A point on the circle. Phases are carried as unconstrained real lifts
// everywhere in this code; wrapping happens only at output boundaries.
struct TorusAngle {
  double lift = 0.0;
  double wrapped() const { return wrap_angle(lift); }
};

// Coupling function on the 2-torus (the phase-interaction kernels of the
// dynamics). Two families: amplitude*sin(u - v + lag), or a tabulated grid
// over [0,2pi)^2 evaluated with periodic bilinear interpolation. Carries
// sup-norm and Lipschitz metadata (w.r.t. the Euclidean geodesic metric on
// the torus); analytic for the sine family, finite-difference estimates for
// tables.
class CouplingSpec {
 public:
  enum class Family { kSineLag, kTabulated };

  static CouplingSpec sine_lag(double amplitude, double lag);
  // values: m*m row-major samples at grid nodes (i*h, j*h), h = 2*pi/m.
  static CouplingSpec tabulated(std::vector<double> values, int grid_n);

  double operator()(double u, double v) const;

  Family family() const { return family_; }
  double amplitude() const { return amplitude_; }
  double lag() const { return lag_; }
  double sup_norm() const { return sup_norm_; }
  double lipschitz() const { return lipschitz_; }

 private:
  CouplingSpec() = default;

  Family family_ = Family::kSineLag;
  double amplitude_ = 0.0;
  double lag_ = 0.0;
  double sup_norm_ = 0.0;
  double lipschitz_ = 0.0;
  std::vector<double> table_;
  int grid_n_ = 0;
};

// Intrinsic frequency omega(x, phi, t). The families implemented here depend
// on the vertex coordinate x only; the (phi, t) arguments exist so the
// evaluation signature matches the general model.
class FrequencySpec {
 public:
  enum class Family { kConstant, kAffineInX, kTabulated };

  static FrequencySpec constant(double value);
  // omega(x) = offset + slope * x
  static FrequencySpec affine(double offset, double slope);
  // per-cell constants on the uniform partition of [0,1] into values.size() cells
  static FrequencySpec tabulated(std::vector<double> cell_values);

  double operator()(double x, double phi, double t) const;
  double operator()(double x) const { return (*this)(x, 0.0, 0.0); }

  Family family() const { return family_; }
  double lipschitz() const { return lipschitz_; }
  double sup_norm() const { return sup_norm_; }
  const std::vector<double>& table() const { return table_; }
  double offset() const { return offset_; }
  double slope() const { return slope_; }

 private:
  FrequencySpec() = default;

  Family family_ = Family::kConstant;
  double offset_ = 0.0;
  double slope_ = 0.0;
  double lipschitz_ = 0.0;
  double sup_norm_ = 0.0;
  std::vector<double> table_;
};

// sup_x |a(x) - b(x)| over [0,1]; exact for constant/affine pairs, sampled
// otherwise (midpoints of `samples` cells plus the endpoints).
double frequency_sup_difference(const FrequencySpec& a, const FrequencySpec& b,
                                int samples = 4096);

// Full problem definition: coupling D, plasticity H, frequency omega,
// adaptation rate epsilon, and the time window [t0, t0 + horizon].
struct ModelSpec {
  CouplingSpec coupling_d;
  CouplingSpec coupling_h;
  FrequencySpec omega;
  double epsilon = 0.0;
  double t0 = 0.0;
  double horizon = 1.0;

  // validates epsilon >= 0 and horizon > 0
  ModelSpec(CouplingSpec d, CouplingSpec h, FrequencySpec omega_, double epsilon_,
            double t0_, double horizon_);

  std::string describe() const;
};

// The sine-coupled model: D(u,v) = sin(u-v+a), H(u,v) = sin(u-v+b),
// constant frequency omega0.
ModelSpec make_berner(double omega0, double a, double b, double epsilon,
                      double t0, double horizon);

// Plasticity presets: Hebbian (b = 0) and spike-timing-dependent (b = -pi/2).
ModelSpec make_berner_hebbian(double omega0, double a, double epsilon, double t0,
                              double horizon);
ModelSpec make_berner_stdp(double omega0, double a, double epsilon, double t0,
                           double horizon);

}  // namespace coevo
