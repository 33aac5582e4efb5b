#include "coevo/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace coevo {

Partition::Partition(int n_) : n(n_) {
  if (n < 1) throw std::invalid_argument("Partition: n must be >= 1");
}

int Partition::cell_index(double x) const {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::out_of_range("Partition: point outside [0,1]");
  int i = static_cast<int>(x * n);
  return std::min(i, n - 1);  // x == 1 belongs to the last (closed) cell
}

Kernel Kernel::constant(double c) {
  Kernel k;
  k.family_ = Family::kConstant;
  k.eval_ = [c](double, double) { return c; };
  k.inf_bound_ = c;
  k.sup_bound_ = c;
  k.certified_ = true;
  return k;
}

Kernel Kernel::cosine_shift(double base, double amplitude) {
  Kernel k;
  k.family_ = Family::kCosineShift;
  k.eval_ = [base, amplitude](double x, double y) {
    return base + amplitude * std::cos(kTwoPi * (x - y));
  };
  k.inf_bound_ = base - std::abs(amplitude);
  k.sup_bound_ = base + std::abs(amplitude);
  k.certified_ = true;
  return k;
}

Kernel Kernel::product(double scale, double offset) {
  Kernel k;
  k.family_ = Family::kProduct;
  k.eval_ = [scale, offset](double x, double y) { return offset + scale * x * y; };
  // bilinear in (x,y): extremes at the corners of [0,1]^2
  k.inf_bound_ = offset + std::min(0.0, scale);
  k.sup_bound_ = offset + std::max(0.0, scale);
  k.certified_ = true;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> values, int grid_n) {
  if (grid_n < 1) throw std::invalid_argument("tabulated kernel: grid_n >= 1");
  if (static_cast<int>(values.size()) != grid_n * grid_n)
    throw std::invalid_argument("tabulated kernel: values must be grid_n x grid_n");
  Kernel k;
  k.family_ = Family::kTabulated;
  auto lo = std::minmax_element(values.begin(), values.end());
  k.inf_bound_ = *lo.first;
  k.sup_bound_ = *lo.second;
  k.certified_ = false;  // grid minima only; see check_assumptions
  auto table = std::make_shared<std::vector<double>>(std::move(values));
  const int n = grid_n;
  k.eval_ = [table, n](double x, double y) {
    // bilinear between cell midpoints, constant extrapolation at the border
    auto coord = [n](double v) {
      double s = v * n - 0.5;
      double c = std::clamp(s, 0.0, static_cast<double>(n - 1));
      int i0 = std::min(static_cast<int>(c), n - 2 >= 0 ? n - 2 : 0);
      if (n == 1) i0 = 0;
      double f = std::clamp(c - i0, 0.0, 1.0);
      return std::pair<int, double>(i0, f);
    };
    auto [i0, fx] = coord(x);
    auto [j0, fy] = coord(y);
    const int i1 = std::min(i0 + 1, n - 1);
    const int j1 = std::min(j0 + 1, n - 1);
    const auto& t = *table;
    const double f00 = t[static_cast<size_t>(i0) * n + j0];
    const double f10 = t[static_cast<size_t>(i1) * n + j0];
    const double f01 = t[static_cast<size_t>(i0) * n + j1];
    const double f11 = t[static_cast<size_t>(i1) * n + j1];
    return (1 - fx) * (1 - fy) * f00 + fx * (1 - fy) * f10 + (1 - fx) * fy * f01 +
           fx * fy * f11;
  };
  return k;
}

Kernel Kernel::custom(std::function<double(double, double)> f, double inf_bound,
                      double sup_bound) {
  Kernel k;
  k.family_ = Family::kCustom;
  k.eval_ = std::move(f);
  k.inf_bound_ = inf_bound;
  k.sup_bound_ = sup_bound;
  k.certified_ = false;
  return k;
}

StepGraphon::StepGraphon(Partition p, std::vector<double> w)
    : partition(p), weights(std::move(w)) {
  if (weights.size() != static_cast<size_t>(p.n) * p.n)
    throw std::invalid_argument("StepGraphon: weights must be n x n");
}

double StepGraphon::fiber_mass(int i) const {
  double s = 0.0;
  for (int j = 0; j < partition.n; ++j) s += at(i, j);
  return s / partition.n;
}

double StepGraphon::fiber_tv(int i) const {
  double s = 0.0;
  for (int j = 0; j < partition.n; ++j) s += std::abs(at(i, j));
  return s / partition.n;
}

double StepGraphon::max_fiber_tv() const {
  double m = 0.0;
  for (int i = 0; i < partition.n; ++i) m = std::max(m, fiber_tv(i));
  return m;
}

double StepGraphon::min_entry() const {
  return *std::min_element(weights.begin(), weights.end());
}

double StepGraphon::max_abs_entry() const {
  double m = 0.0;
  for (double w : weights) m = std::max(m, std::abs(w));
  return m;
}

PhaseField::PhaseField(Partition p, std::vector<double> values)
    : partition(p), phases(std::move(values)) {
  if (phases.size() != static_cast<size_t>(p.n))
    throw std::invalid_argument("PhaseField: one value per cell required");
}

std::vector<double> discretize_frequencies(const FrequencySpec& omega,
                                           const Partition& p, int subsamples) {
  if (subsamples < 1) throw std::invalid_argument("subsamples >= 1");
  std::vector<double> out(p.n);
  using F = FrequencySpec::Family;
  if (omega.family() == F::kConstant) {
    std::fill(out.begin(), out.end(), omega(0.0));
    return out;
  }
  if (omega.family() == F::kAffineInX) {
    // exact cell mean of an affine function = value at the midpoint
    for (int i = 0; i < p.n; ++i) out[i] = omega(p.midpoint(i));
    return out;
  }
  for (int i = 0; i < p.n; ++i) {
    double acc = 0.0;
    for (int s = 0; s < subsamples; ++s) {
      const double x = p.cell_lower(i) + (s + 0.5) / (subsamples * p.n);
      acc += omega(x);
    }
    out[i] = acc / subsamples;
  }
  return out;
}

StepGraphon discretize_weights_average(const Kernel& k, const Partition& p,
                                       int subsamples) {
  if (subsamples < 1) throw std::invalid_argument("subsamples >= 1");
  const int n = p.n;
  const int m = subsamples;
  std::vector<double> w(static_cast<size_t>(n) * n);
  const double sub = 1.0 / (n * m);
  for (int i = 0; i < n; ++i) {
    const double x0 = p.cell_lower(i);
    for (int j = 0; j < n; ++j) {
      const double y0 = p.cell_lower(j);
      double acc = 0.0;
      for (int s = 0; s < m; ++s) {
        const double x = x0 + (s + 0.5) * sub;
        for (int t = 0; t < m; ++t) {
          acc += k(x, y0 + (t + 0.5) * sub);
        }
      }
      w[static_cast<size_t>(i) * n + j] = acc / (m * m);
    }
  }
  return StepGraphon(p, std::move(w));
}

StepGraphon discretize_weights_sample(const Kernel& k, const Partition& p) {
  const int n = p.n;
  std::vector<double> w(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w[static_cast<size_t>(i) * n + j] = k(p.midpoint(i), p.midpoint(j));
  return StepGraphon(p, std::move(w));
}

PhaseField discretize_phases(const std::function<double(double)>& phi0,
                             const Partition& p, int subsamples) {
  if (!phi0) throw std::invalid_argument("discretize_phases: null initial data");
  if (subsamples < 1) throw std::invalid_argument("subsamples >= 1");
  std::vector<double> ph(p.n);
  for (int i = 0; i < p.n; ++i) {
    double acc = 0.0;
    for (int s = 0; s < subsamples; ++s)
      acc += phi0(p.cell_lower(i) + (s + 0.5) / (subsamples * p.n));
    ph[i] = acc / subsamples;
  }
  return PhaseField(p, std::move(ph));
}

PhaseField lift_phases(std::vector<double> values, const Partition& p) {
  return PhaseField(p, std::move(values));
}

StepGraphon lift_weights(std::vector<double> weights, const Partition& p) {
  return StepGraphon(p, std::move(weights));
}

StepGraphon refine(const StepGraphon& g, int m) {
  const int n = g.partition.n;
  if (m < n || m % n != 0)
    throw std::invalid_argument("refine: m must be a positive multiple of n");
  if (m == n) return g;
  const int r = m / n;
  std::vector<double> w(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    const int ci = i / r;
    for (int j = 0; j < m; ++j)
      w[static_cast<size_t>(i) * m + j] = g.at(ci, j / r);
  }
  return StepGraphon(Partition(m), std::move(w));
}

PhaseField refine(const PhaseField& f, int m) {
  const int n = f.partition.n;
  if (m < n || m % n != 0)
    throw std::invalid_argument("refine: m must be a positive multiple of n");
  if (m == n) return f;
  const int r = m / n;
  std::vector<double> ph(m);
  for (int i = 0; i < m; ++i) ph[i] = f.phases[i / r];
  return PhaseField(Partition(m), std::move(ph));
}

double positivity_threshold(const CouplingSpec& h, double epsilon, double T) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
  return h.sup_norm() * std::expm1(epsilon * T);
}

double berner_horizon_bound(double c_w, double epsilon) {
  if (!(c_w > 0.0)) throw std::invalid_argument("horizon bound requires c_w > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (epsilon == 0.0) return std::numeric_limits<double>::infinity();
  return std::log1p(c_w) / epsilon;
}

bool AssumptionReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

bool AssumptionReport::regularity_pass() const {
  for (const auto& c : checks)
    if (!c.pass && c.id != "A5") return false;
  return true;
}

const AssumptionCheck& AssumptionReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw std::out_of_range("no such assumption check: " + id);
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << c.id << (c.pass ? " pass" : " FAIL") << " (margin " << c.margin << "; "
       << c.detail << ")\n";
  return os.str();
}

namespace {

// Measured Lipschitz ratio of a torus coupling over a grid of pairs.
double sampled_coupling_slope(const CouplingSpec& c, int density) {
  double worst = 0.0;
  const double h = kTwoPi / density;
  for (int i = 0; i < density; ++i) {
    for (int j = 0; j < density; ++j) {
      const double u = i * h, v = j * h;
      const double f = c(u, v);
      worst = std::max(worst, std::abs(c(u + h, v) - f) / h);
      worst = std::max(worst, std::abs(c(u, v + h) - f) / h);
    }
  }
  return worst;
}

// Max jump of the kernel between sample points at resolution 1/steps.
double kernel_modulus(const Kernel& k, int steps) {
  double worst = 0.0;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const double x = i * h, y = std::min(j * h, 1.0);
      worst = std::max(worst, std::abs(k(x + h, y) - k(x, y)));
      worst = std::max(worst, std::abs(k(y, x + h) - k(y, x)));
    }
  }
  return worst;
}

double function_modulus(const std::function<double(double)>& f, int steps) {
  double worst = 0.0;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i)
    worst = std::max(worst, std::abs(f((i + 1) * h) - f(i * h)));
  return worst;
}

// Continuity heuristic: the modulus at half the step must drop (or already be
// negligible). Step discontinuities keep a constant modulus and fail.
bool modulus_decays(double coarse, double fine, double scale) {
  const double tiny = 1e-12 * std::max(1.0, scale);
  if (fine <= tiny) return true;
  return fine <= 0.75 * coarse;
}

}  // namespace

AssumptionReport check_assumptions(const Kernel& k, const ModelSpec& model,
                                   const std::function<double(double)>& phi0,
                                   int sample_density) {
  if (sample_density < 4) throw std::invalid_argument("sample_density >= 4");
  AssumptionReport report;
  report.sample_density = sample_density;
  const double tol = 1e-9;

  auto lipschitz_check = [&](const std::string& id, const std::string& what,
                             double declared, double measured) {
    AssumptionCheck c;
    c.id = id;
    c.what = what;
    c.margin = declared - measured;
    c.pass = measured <= declared * (1.0 + tol) + 1e-12;
    std::ostringstream os;
    os << "declared Lip " << declared << ", sampled slope " << measured;
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  };

  lipschitz_check("A1", "coupling D Lipschitz",
                  model.coupling_d.lipschitz(),
                  sampled_coupling_slope(model.coupling_d, sample_density));
  lipschitz_check("A2", "plasticity H Lipschitz",
                  model.coupling_h.lipschitz(),
                  sampled_coupling_slope(model.coupling_h, sample_density));

  {
    AssumptionCheck c;
    c.id = "A3";
    c.what = "frequency omega Lipschitz in x";
    double worst = 0.0;
    const double h = 1.0 / sample_density;
    for (int i = 0; i < sample_density; ++i)
      worst = std::max(worst,
                       std::abs(model.omega((i + 1) * h) - model.omega(i * h)) / h);
    const bool step_family =
        model.omega.family() == FrequencySpec::Family::kTabulated;
    c.margin = model.omega.lipschitz() - worst;
    c.pass = step_family || worst <= model.omega.lipschitz() * (1.0 + tol) + 1e-12;
    std::ostringstream os;
    os << "declared Lip " << model.omega.lipschitz() << ", sampled slope " << worst;
    if (step_family) os << " (step family: slope estimate only)";
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  }

  const double scale = std::max(std::abs(k.sup_bound()), std::abs(k.inf_bound()));
  {
    AssumptionCheck c;
    c.id = "A4";
    c.what = "initial data continuity";
    const double coarse = kernel_modulus(k, sample_density / 2);
    const double fine = kernel_modulus(k, sample_density);
    bool ok = modulus_decays(coarse, fine, scale);
    std::ostringstream os;
    os << "eta0 TV-modulus " << coarse << " -> " << fine << " on halved step";
    if (phi0) {
      const double pc = function_modulus(phi0, sample_density / 2);
      const double pf = function_modulus(phi0, sample_density);
      ok = ok && modulus_decays(pc, pf, 1.0);
      os << "; phi0 modulus " << pc << " -> " << pf;
    } else {
      os << "; phi0 not supplied";
    }
    c.pass = ok;
    c.margin = coarse - fine;
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  }

  {
    AssumptionCheck c;
    c.id = "A5";
    c.what = "positivity floor inf W >= ||H||_inf (e^(eps T) - 1)";
    double inf_w = k.inf_bound();
    std::ostringstream os;
    if (!k.certified_bounds()) {
      // fall back on the declared bound refined by a sample sweep
      for (int i = 0; i <= sample_density; ++i)
        for (int j = 0; j <= sample_density; ++j)
          inf_w = std::min(inf_w, k(static_cast<double>(i) / sample_density,
                                    static_cast<double>(j) / sample_density));
      os << "sampled inf (density " << sample_density << ") ";
    } else {
      os << "analytic inf ";
    }
    const double threshold =
        positivity_threshold(model.coupling_h, model.epsilon, model.horizon);
    c.margin = inf_w - threshold;
    c.pass = c.margin >= 0.0;
    os << inf_w << " vs threshold " << threshold;
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  }

  {
    AssumptionCheck c;
    c.id = "A6";
    c.what = "kernel W continuous in x and y";
    const double coarse = kernel_modulus(k, sample_density / 2);
    const double fine = kernel_modulus(k, sample_density);
    c.pass = modulus_decays(coarse, fine, scale);
    c.margin = coarse - fine;
    std::ostringstream os;
    os << "modulus " << coarse << " -> " << fine << " on halved step";
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  }

  {
    AssumptionCheck c;
    c.id = "A7";
    c.what = "uniform partitions of [0,1]";
    c.pass = true;
    c.margin = 0.0;
    c.detail = "uniform cells of measure 1/n, diameter 1/n -> 0";
    report.checks.push_back(std::move(c));
  }

  return report;
}

}  // namespace coevo
