#include "coevo/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coevo {

double torus_distance(double u, double v) {
  // remainder(x, 2pi) lands in [-pi, pi], so |.| is the geodesic distance
  return std::abs(std::remainder(u - v, kTwoPi));
}

double wrap_angle(double lift) {
  double w = std::fmod(lift, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // fmod can round up to 2*pi for tiny negatives
  return w;
}

CouplingSpec CouplingSpec::sine_lag(double amplitude, double lag) {
  CouplingSpec spec;
  spec.family_ = Family::kSineLag;
  spec.amplitude_ = amplitude;
  spec.lag_ = lag;
  spec.sup_norm_ = std::abs(amplitude);
  // gradient of sin(u - v + lag) has norm sqrt(2)*|cos| <= sqrt(2)
  spec.lipschitz_ = std::sqrt(2.0) * std::abs(amplitude);
  return spec;
}

CouplingSpec CouplingSpec::tabulated(std::vector<double> values, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("tabulated coupling needs grid_n >= 2");
  if (static_cast<int>(values.size()) != grid_n * grid_n)
    throw std::invalid_argument("tabulated coupling: values must be grid_n x grid_n");
  CouplingSpec spec;
  spec.family_ = Family::kTabulated;
  spec.table_ = std::move(values);
  spec.grid_n_ = grid_n;

  double sup = 0.0;
  for (double v : spec.table_) sup = std::max(sup, std::abs(v));
  spec.sup_norm_ = sup;

  // max finite-difference slope per axis; bilinear interpolation cannot exceed it
  const double h = kTwoPi / grid_n;
  double slope_u = 0.0, slope_v = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const double f = spec.table_[static_cast<size_t>(i) * grid_n + j];
      const double fu = spec.table_[static_cast<size_t>((i + 1) % grid_n) * grid_n + j];
      const double fv = spec.table_[static_cast<size_t>(i) * grid_n + (j + 1) % grid_n];
      slope_u = std::max(slope_u, std::abs(fu - f) / h);
      slope_v = std::max(slope_v, std::abs(fv - f) / h);
    }
  }
  spec.lipschitz_ = std::hypot(slope_u, slope_v);
  return spec;
}

double CouplingSpec::operator()(double u, double v) const {
  if (family_ == Family::kSineLag) {
    return amplitude_ * std::sin(u - v + lag_);
  }
  const double h = kTwoPi / grid_n_;
  const double su = wrap_angle(u) / h;
  const double sv = wrap_angle(v) / h;
  int i0 = static_cast<int>(su);
  int j0 = static_cast<int>(sv);
  if (i0 >= grid_n_) i0 = grid_n_ - 1;
  if (j0 >= grid_n_) j0 = grid_n_ - 1;
  const double fu = su - i0;
  const double fv = sv - j0;
  const int i1 = (i0 + 1) % grid_n_;
  const int j1 = (j0 + 1) % grid_n_;
  const double f00 = table_[static_cast<size_t>(i0) * grid_n_ + j0];
  const double f10 = table_[static_cast<size_t>(i1) * grid_n_ + j0];
  const double f01 = table_[static_cast<size_t>(i0) * grid_n_ + j1];
  const double f11 = table_[static_cast<size_t>(i1) * grid_n_ + j1];
  return (1.0 - fu) * (1.0 - fv) * f00 + fu * (1.0 - fv) * f10 +
         (1.0 - fu) * fv * f01 + fu * fv * f11;
}

FrequencySpec FrequencySpec::constant(double value) {
  FrequencySpec spec;
  spec.family_ = Family::kConstant;
  spec.offset_ = value;
  spec.lipschitz_ = 0.0;
  spec.sup_norm_ = std::abs(value);
  return spec;
}

FrequencySpec FrequencySpec::affine(double offset, double slope) {
  FrequencySpec spec;
  spec.family_ = Family::kAffineInX;
  spec.offset_ = offset;
  spec.slope_ = slope;
  spec.lipschitz_ = std::abs(slope);
  spec.sup_norm_ = std::max(std::abs(offset), std::abs(offset + slope));
  return spec;
}

FrequencySpec FrequencySpec::tabulated(std::vector<double> cell_values) {
  if (cell_values.empty())
    throw std::invalid_argument("tabulated frequency: need at least one cell");
  FrequencySpec spec;
  spec.family_ = Family::kTabulated;
  spec.table_ = std::move(cell_values);
  const int n = static_cast<int>(spec.table_.size());
  double sup = 0.0, slope = 0.0;
  for (int i = 0; i < n; ++i) {
    sup = std::max(sup, std::abs(spec.table_[i]));
    if (i + 1 < n)
      slope = std::max(slope, std::abs(spec.table_[i + 1] - spec.table_[i]) * n);
  }
  spec.sup_norm_ = sup;
  spec.lipschitz_ = slope;  // slope estimate; the step function itself is not Lipschitz
  return spec;
}

double FrequencySpec::operator()(double x, double /*phi*/, double /*t*/) const {
  switch (family_) {
    case Family::kConstant:
      return offset_;
    case Family::kAffineInX:
      return offset_ + slope_ * x;
    case Family::kTabulated: {
      const int n = static_cast<int>(table_.size());
      int i = static_cast<int>(x * n);
      i = std::clamp(i, 0, n - 1);
      return table_[i];
    }
  }
  return 0.0;
}

double frequency_sup_difference(const FrequencySpec& a, const FrequencySpec& b,
                                int samples) {
  using F = FrequencySpec::Family;
  const bool both_smooth = a.family() != F::kTabulated && b.family() != F::kTabulated;
  if (both_smooth) {
    // difference of two affine functions is affine: extremes at the endpoints
    return std::max(std::abs(a(0.0) - b(0.0)), std::abs(a(1.0) - b(1.0)));
  }
  double sup = std::max(std::abs(a(0.0) - b(0.0)), std::abs(a(1.0) - b(1.0)));
  for (int k = 0; k < samples; ++k) {
    const double x = (k + 0.5) / samples;
    sup = std::max(sup, std::abs(a(x) - b(x)));
  }
  return sup;
}

ModelSpec::ModelSpec(CouplingSpec d, CouplingSpec h, FrequencySpec omega_,
                     double epsilon_, double t0_, double horizon_)
    : coupling_d(std::move(d)),
      coupling_h(std::move(h)),
      omega(std::move(omega_)),
      epsilon(epsilon_),
      t0(t0_),
      horizon(horizon_) {
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("ModelSpec: epsilon must be >= 0");
  if (!(horizon > 0.0))
    throw std::invalid_argument("ModelSpec: horizon T must be > 0");
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  if (coupling_d.family() == CouplingSpec::Family::kSineLag &&
      coupling_h.family() == CouplingSpec::Family::kSineLag &&
      omega.family() == FrequencySpec::Family::kConstant) {
    os << "berner(omega=" << omega(0.0) << ",a=" << coupling_d.lag()
       << ",b=" << coupling_h.lag() << ",amp_d=" << coupling_d.amplitude()
       << ",amp_h=" << coupling_h.amplitude();
  } else {
    os << "custom(";
  }
  os << ",eps=" << epsilon << ",t0=" << t0 << ",T=" << horizon << ")";
  return os.str();
}

ModelSpec make_berner(double omega0, double a, double b, double epsilon,
                      double t0, double horizon) {
  return ModelSpec(CouplingSpec::sine_lag(1.0, a), CouplingSpec::sine_lag(1.0, b),
                   FrequencySpec::constant(omega0), epsilon, t0, horizon);
}

ModelSpec make_berner_hebbian(double omega0, double a, double epsilon, double t0,
                              double horizon) {
  return make_berner(omega0, a, 0.0, epsilon, t0, horizon);
}

ModelSpec make_berner_stdp(double omega0, double a, double epsilon, double t0,
                           double horizon) {
  return make_berner(omega0, a, -kTwoPi / 4.0, epsilon, t0, horizon);
}

}  // namespace coevo
