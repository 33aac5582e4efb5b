#include "coevo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

#include "coevo/graphon.hpp"

namespace coevo {

namespace {

constexpr double kTimeSlack = 1e-9;

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

long long step_count(double horizon, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const long long steps = std::llround(horizon / dt);
  if (steps < 1 || std::abs(steps * dt - horizon) > kTimeSlack * std::max(1.0, horizon))
    throw std::invalid_argument("dt must divide the horizon within rounding slack");
  return steps;
}

// Row-factor tables for amplitude*sin(u - v + lag): the pair sum splits as
// sin(u+lag)cos(v) - cos(u+lag)sin(v), turning the coupling sum into two
// dot products against the column trig tables.
struct SineTables {
  std::vector<double> cos_col, sin_col;    // cos(phi_j), sin(phi_j)
  std::vector<double> d_sin, d_cos;        // amp_D sin/cos(phi_i + a)
  std::vector<double> h_sin, h_cos;        // amp_H sin/cos(phi_i + b)

  void resize(int n) {
    cos_col.resize(n);
    sin_col.resize(n);
    d_sin.resize(n);
    d_cos.resize(n);
    h_sin.resize(n);
    h_cos.resize(n);
  }

  void fill(std::span<const double> phases, const ModelSpec& model) {
    const int n = static_cast<int>(phases.size());
    const double a = model.coupling_d.lag(), amp_d = model.coupling_d.amplitude();
    const double b = model.coupling_h.lag(), amp_h = model.coupling_h.amplitude();
    for (int j = 0; j < n; ++j) {
      cos_col[j] = std::cos(phases[j]);
      sin_col[j] = std::sin(phases[j]);
    }
    for (int i = 0; i < n; ++i) {
      d_sin[i] = amp_d * std::sin(phases[i] + a);
      d_cos[i] = amp_d * std::cos(phases[i] + a);
      h_sin[i] = amp_h * std::sin(phases[i] + b);
      h_cos[i] = amp_h * std::cos(phases[i] + b);
    }
  }
};

bool sine_fast_path(const ModelSpec& model) {
  return model.coupling_d.family() == CouplingSpec::Family::kSineLag &&
         model.coupling_h.family() == CouplingSpec::Family::kSineLag;
}

double phase_derivative_row(int i, int n, const double* w_row,
                            const SineTables& tab, double omega_i) {
  double dot_c = 0.0, dot_s = 0.0;
  for (int j = 0; j < n; ++j) {
    dot_c += w_row[j] * tab.cos_col[j];
    dot_s += w_row[j] * tab.sin_col[j];
  }
  return omega_i + (tab.d_sin[i] * dot_c - tab.d_cos[i] * dot_s) / n;
}

}  // namespace

SystemState::SystemState(double t_, std::vector<double> phases_,
                         std::vector<double> weights_)
    : t(t_), phases(std::move(phases_)), weights(std::move(weights_)) {
  if (weights.size() != phases.size() * phases.size())
    throw std::invalid_argument("SystemState: weights must be n x n");
}

bool SystemState::finite() const { return all_finite(phases) && all_finite(weights); }

double SystemState::min_weight() const {
  return *std::min_element(weights.begin(), weights.end());
}

double SystemState::max_abs_weight() const {
  double m = 0.0;
  for (double w : weights) m = std::max(m, std::abs(w));
  return m;
}

void rhs(const SystemState& state, const ModelSpec& model,
         std::span<const double> cell_omegas, std::span<double> dphases,
         std::span<double> dweights) {
  const int n = state.n();
  if (static_cast<int>(cell_omegas.size()) != n ||
      static_cast<int>(dphases.size()) != n ||
      dweights.size() != state.weights.size())
    throw std::invalid_argument("rhs: inconsistent dimensions");

  const double eps = model.epsilon;
  if (sine_fast_path(model)) {
    SineTables tab;
    tab.resize(n);
    tab.fill(state.phases, model);
    for (int i = 0; i < n; ++i) {
      const double* w_row = state.weights.data() + static_cast<size_t>(i) * n;
      dphases[i] = phase_derivative_row(i, n, w_row, tab, cell_omegas[i]);
      double* dw_row = dweights.data() + static_cast<size_t>(i) * n;
      const double hs = tab.h_sin[i], hc = tab.h_cos[i];
      for (int j = 0; j < n; ++j) {
        const double hij = hs * tab.cos_col[j] - hc * tab.sin_col[j];
        dw_row[j] = -eps * (w_row[j] + hij);
      }
    }
    return;
  }

  for (int i = 0; i < n; ++i) {
    const double ui = state.phases[i];
    const double* w_row = state.weights.data() + static_cast<size_t>(i) * n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += w_row[j] * model.coupling_d(ui, state.phases[j]);
    dphases[i] = cell_omegas[i] + acc / n;
    double* dw_row = dweights.data() + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j)
      dw_row[j] = -eps * (w_row[j] + model.coupling_h(ui, state.phases[j]));
  }
}

namespace {

// One RK4 step with the stage derivative fused into the accumulator and
// next-stage-state updates; keeps the weight working set at three n*n arrays.
class Rk4Stepper {
 public:
  Rk4Stepper(const ModelSpec& model, std::vector<double> cell_omegas, int n)
      : model_(model), omegas_(std::move(cell_omegas)), n_(n), fast_(sine_fast_path(model)) {
    const size_t nn = static_cast<size_t>(n) * n;
    stage_phases_.resize(n);
    acc_phases_.resize(n);
    dphi_.resize(n);
    stage_weights_.resize(nn);
    acc_weights_.resize(nn);
    tab_.resize(n);
  }

  void step(SystemState& y, double dt) {
    // c = accumulator coefficient, h = offset to the next stage state
    static constexpr double kAccCoef[4] = {1.0, 2.0, 2.0, 1.0};
    const double kStageH[4] = {dt / 2.0, dt / 2.0, dt, 0.0};
    for (int stage = 0; stage < 4; ++stage) {
      const bool first = stage == 0;
      const bool last = stage == 3;
      std::span<const double> in_phi = first ? std::span<const double>(y.phases)
                                             : std::span<const double>(stage_phases_);
      const double* in_w = first ? y.weights.data() : stage_weights_.data();
      run_stage(y, in_phi, in_w, kAccCoef[stage], kStageH[stage], first, last);
    }
    const double scale = dt / 6.0;
    for (int i = 0; i < n_; ++i) y.phases[i] += scale * acc_phases_[i];
    double* yw = y.weights.data();
    const double* aw = acc_weights_.data();
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n_) * n_;
#pragma omp parallel for schedule(static) if (n_ >= 128)
    for (std::ptrdiff_t k = 0; k < nn; ++k) yw[k] += scale * aw[k];
  }

 private:
  void run_stage(const SystemState& y, std::span<const double> in_phi,
                 const double* in_w, double c, double h, bool first, bool last) {
    if (fast_) tab_.fill(in_phi, model_);
    const double eps = model_.epsilon;
    const double* yw = y.weights.data();
    double* sw = stage_weights_.data();
    double* aw = acc_weights_.data();

#pragma omp parallel for schedule(static) if (n_ >= 128)
    for (int i = 0; i < n_; ++i) {
      const double* w_row = in_w + static_cast<size_t>(i) * n_;
      double d = 0.0;
      if (fast_) {
        d = phase_derivative_row(i, n_, w_row, tab_, omegas_[i]);
      } else {
        double acc = 0.0;
        for (int j = 0; j < n_; ++j)
          acc += w_row[j] * model_.coupling_d(in_phi[i], in_phi[j]);
        d = omegas_[i] + acc / n_;
      }
      dphi_[i] = d;
    }

#pragma omp parallel for schedule(static) if (n_ >= 128)
    for (int i = 0; i < n_; ++i) {
      const size_t off = static_cast<size_t>(i) * n_;
      const double* w_row = in_w + off;
      const double* y_row = yw + off;
      double* s_row = sw + off;
      double* a_row = aw + off;
      if (fast_) {
        const double hs = tab_.h_sin[i], hc = tab_.h_cos[i];
        for (int j = 0; j < n_; ++j) {
          const double hij = hs * tab_.cos_col[j] - hc * tab_.sin_col[j];
          const double kw = -eps * (w_row[j] + hij);
          a_row[j] = first ? kw : a_row[j] + c * kw;
          if (!last) s_row[j] = y_row[j] + h * kw;
        }
      } else {
        for (int j = 0; j < n_; ++j) {
          const double hij = model_.coupling_h(in_phi[i], in_phi[j]);
          const double kw = -eps * (w_row[j] + hij);
          a_row[j] = first ? kw : a_row[j] + c * kw;
          if (!last) s_row[j] = y_row[j] + h * kw;
        }
      }
    }

    for (int i = 0; i < n_; ++i) {
      acc_phases_[i] = first ? dphi_[i] : acc_phases_[i] + c * dphi_[i];
      if (!last) stage_phases_[i] = y.phases[i] + h * dphi_[i];
    }
  }

  const ModelSpec& model_;
  std::vector<double> omegas_;
  int n_;
  bool fast_;
  SineTables tab_;
  std::vector<double> stage_phases_, acc_phases_, dphi_;
  std::vector<double> stage_weights_, acc_weights_;
};

}  // namespace

Trajectory integrate(const SystemState& initial, const ModelSpec& model, double dt,
                     int sample_stride, int quad_subsamples) {
  if (sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");
  if (!initial.finite())
    throw std::runtime_error("integrate: non-finite initial state");
  const long long steps = step_count(model.horizon, dt);
  const int n = initial.n();

  auto omegas = discretize_frequencies(model.omega, Partition(n), quad_subsamples);
  Rk4Stepper stepper(model, omegas, n);

  Trajectory traj{model, n, {}, {}};
  traj.times.reserve(static_cast<size_t>(steps / sample_stride) + 2);
  traj.states.reserve(traj.times.capacity());

  SystemState y = initial;
  y.t = model.t0;
  traj.times.push_back(y.t);
  traj.states.push_back(y);

  for (long long k = 1; k <= steps; ++k) {
    stepper.step(y, dt);
    y.t = model.t0 + static_cast<double>(k) * dt;
    if (k % sample_stride == 0 || k == steps) {
      if (!y.finite()) {
        std::ostringstream os;
        os << "integrate: state blew up (non-finite entry) at t=" << y.t
           << "; check the configuration";
        throw std::runtime_error(os.str());
      }
      traj.times.push_back(y.t);
      traj.states.push_back(y);
    }
  }
  return traj;
}

std::vector<double> weights_exact_update(const std::vector<double>& w0,
                                         const Trajectory& phase_history,
                                         const ModelSpec& model) {
  const int n = phase_history.n;
  if (w0.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("weights_exact_update: w0 must be n x n");
  if (phase_history.size() < 1)
    throw std::invalid_argument("weights_exact_update: empty history");

  const double eps = model.epsilon;
  const double t_end = phase_history.times.back();
  const double t_start = phase_history.times.front();
  const size_t nn = static_cast<size_t>(n) * n;

  // integrand at a grid point, weighted by the integrating factor
  std::vector<double> prev(nn), cur(nn), integral(nn, 0.0);
  SineTables tab;
  const bool fast = model.coupling_h.family() == CouplingSpec::Family::kSineLag;
  if (fast) tab.resize(n);

  auto fill = [&](const SystemState& s, std::vector<double>& out) {
    const double decay = std::exp(-eps * (t_end - s.t));
    if (fast) {
      tab.fill(s.phases, model);
      for (int i = 0; i < n; ++i) {
        const double hs = tab.h_sin[i], hc = tab.h_cos[i];
        for (int j = 0; j < n; ++j)
          out[static_cast<size_t>(i) * n + j] =
              decay * (hs * tab.cos_col[j] - hc * tab.sin_col[j]);
      }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out[static_cast<size_t>(i) * n + j] =
              decay * model.coupling_h(s.phases[i], s.phases[j]);
    }
  };

  fill(phase_history.states.front(), prev);
  for (size_t k = 1; k < phase_history.size(); ++k) {
    fill(phase_history.states[k], cur);
    const double half_dt =
        0.5 * (phase_history.times[k] - phase_history.times[k - 1]);
    for (size_t m = 0; m < nn; ++m) integral[m] += half_dt * (prev[m] + cur[m]);
    std::swap(prev, cur);
  }

  const double decay0 = std::exp(-eps * (t_end - t_start));
  std::vector<double> out(nn);
  for (size_t m = 0; m < nn; ++m) out[m] = decay0 * w0[m] - eps * integral[m];
  return out;
}

ManifoldPoint sync_manifold_solution(double phi0, double w0, const ModelSpec& model,
                                     double t) {
  if (model.omega.family() != FrequencySpec::Family::kConstant ||
      model.coupling_d.family() != CouplingSpec::Family::kSineLag ||
      model.coupling_h.family() != CouplingSpec::Family::kSineLag)
    throw std::invalid_argument(
        "sync_manifold_solution: needs constant omega and sine-lag couplings");

  const double dt = t - model.t0;
  const double sa = model.coupling_d.amplitude() * std::sin(model.coupling_d.lag());
  const double sb = model.coupling_h.amplitude() * std::sin(model.coupling_h.lag());
  const double eps = model.epsilon;
  const double omega = model.omega(0.0);

  const double em = std::expm1(-eps * dt);  // e^(-eps dt) - 1
  const double decay_integral = eps > 0.0 ? -em / eps : dt;

  ManifoldPoint p;
  p.w = (w0 + sb) * (1.0 + em) - sb;
  p.phi = phi0 + omega * dt + sa * ((w0 + sb) * decay_integral - sb * dt);
  return p;
}

namespace {

// d_{T,inf} between two trajectories on an identical grid: sup over grid
// times of (max-cell torus distance + max-row TV of the weight difference).
double grid_distance(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  const int n = a.n;
  for (size_t k = 0; k < a.size(); ++k) {
    const auto& sa = a.states[k];
    const auto& sb = b.states[k];
    double phase = 0.0;
    for (int i = 0; i < n; ++i)
      phase = std::max(phase, torus_distance(sa.phases[i], sb.phases[i]));
    double tv = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      const size_t off = static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j)
        row += std::abs(sa.weights[off + j] - sb.weights[off + j]);
      tv = std::max(tv, row / n);
    }
    worst = std::max(worst, phase + tv);
  }
  return worst;
}

Trajectory constant_candidate(const SystemState& initial, const ModelSpec& model,
                              const std::vector<double>& times) {
  Trajectory c{model, initial.n(), times, {}};
  c.states.assign(times.size(), initial);
  for (size_t k = 0; k < times.size(); ++k) c.states[k].t = times[k];
  return c;
}

}  // namespace

Trajectory picard_apply(const Trajectory& candidate, const SystemState& initial,
                        const ModelSpec& model, std::span<const double> cell_omegas) {
  const int n = initial.n();
  if (candidate.n != n || candidate.size() < 1)
    throw std::invalid_argument("picard_apply: candidate/initial mismatch");
  if (std::abs(candidate.times.front() - initial.t) > kTimeSlack)
    throw std::invalid_argument("picard_apply: candidate grid must start at t0");

  const size_t nn = static_cast<size_t>(n) * n;
  const double eps = model.epsilon;
  const bool fast = sine_fast_path(model);
  SineTables tab;
  if (fast) tab.resize(n);

  // integrands at the current grid point
  std::vector<double> g_prev(n), g_cur(n);       // phase integrand
  std::vector<double> f_prev(nn), f_cur(nn);     // weight integrand W + H
  std::vector<double> cum_phi(n, 0.0), cum_w(nn, 0.0);

  auto fill = [&](const SystemState& s, std::vector<double>& g, std::vector<double>& f) {
    if (fast) {
      tab.fill(s.phases, model);
      for (int i = 0; i < n; ++i) {
        const double* w_row = s.weights.data() + static_cast<size_t>(i) * n;
        g[i] = phase_derivative_row(i, n, w_row, tab, cell_omegas[i]);
        const double hs = tab.h_sin[i], hc = tab.h_cos[i];
        double* f_row = f.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j)
          f_row[j] = w_row[j] + (hs * tab.cos_col[j] - hc * tab.sin_col[j]);
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const double ui = s.phases[i];
        const double* w_row = s.weights.data() + static_cast<size_t>(i) * n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += w_row[j] * model.coupling_d(ui, s.phases[j]);
        g[i] = cell_omegas[i] + acc / n;
        double* f_row = f.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j)
          f_row[j] = w_row[j] + model.coupling_h(ui, s.phases[j]);
      }
    }
  };

  Trajectory out{model, n, candidate.times, {}};
  out.states.reserve(candidate.size());
  SystemState first = initial;
  first.t = candidate.times.front();
  out.states.push_back(std::move(first));

  fill(candidate.states.front(), g_prev, f_prev);
  for (size_t k = 1; k < candidate.size(); ++k) {
    fill(candidate.states[k], g_cur, f_cur);
    const double half_dt = 0.5 * (candidate.times[k] - candidate.times[k - 1]);
    for (int i = 0; i < n; ++i) cum_phi[i] += half_dt * (g_prev[i] + g_cur[i]);
    for (size_t m = 0; m < nn; ++m) cum_w[m] += half_dt * (f_prev[m] + f_cur[m]);

    SystemState s;
    s.t = candidate.times[k];
    s.phases.resize(n);
    s.weights.resize(nn);
    for (int i = 0; i < n; ++i) s.phases[i] = initial.phases[i] + cum_phi[i];
    for (size_t m = 0; m < nn; ++m) s.weights[m] = initial.weights[m] - eps * cum_w[m];
    out.states.push_back(std::move(s));
    std::swap(g_prev, g_cur);
    std::swap(f_prev, f_cur);
  }
  return out;
}

PicardResult picard_solve(const SystemState& initial, const ModelSpec& model,
                          double dt, double tol, int max_iter, int quad_subsamples) {
  if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");
  const long long steps = step_count(model.horizon, dt);
  const int n = initial.n();
  const auto omegas =
      discretize_frequencies(model.omega, Partition(n), quad_subsamples);

  // ||eta_0||* for the lifted initial weights
  double eta0_star = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j)
      row += std::abs(initial.weights[static_cast<size_t>(i) * n + j]);
    eta0_star = std::max(eta0_star, row / n);
  }
  const double sigma = model.coupling_h.sup_norm() + eta0_star;
  const double m3 = 4.0 *
                    (model.omega.lipschitz() + model.coupling_d.lipschitz() +
                     model.coupling_d.sup_norm() +
                     model.epsilon * (1.0 + model.coupling_h.lipschitz())) *
                    (eta0_star + sigma);

  // window with M3 t* <= 1/2 (contraction) and eps t* <= 1/2 (sigma choice)
  double t_star = model.horizon;
  if (m3 > 0.0) t_star = std::min(t_star, 0.5 / m3);
  if (model.epsilon > 0.0) t_star = std::min(t_star, 0.5 / model.epsilon);
  long long window_steps =
      std::clamp<long long>(static_cast<long long>(t_star / dt), 1, steps);

  PicardStats stats;
  stats.m3 = m3;
  stats.window_length = static_cast<double>(window_steps) * dt;

  Trajectory full{model, n, {}, {}};
  SystemState chain = initial;
  chain.t = model.t0;
  long long done = 0;
  bool retried = false;

  while (done < steps) {
    const long long w_steps = std::min(window_steps, steps - done);
    std::vector<double> times(static_cast<size_t>(w_steps) + 1);
    for (long long k = 0; k <= w_steps; ++k)
      times[static_cast<size_t>(k)] = model.t0 + static_cast<double>(done + k) * dt;

    Trajectory candidate = constant_candidate(chain, model, times);
    int apps = 0;
    bool converged = false;
    while (apps < max_iter) {
      Trajectory next = picard_apply(candidate, chain, model, omegas);
      ++apps;
      const double d = grid_distance(next, candidate);
      candidate = std::move(next);
      if (d < tol) {
        converged = true;
        break;
      }
    }
    stats.total_applications += apps;
    stats.max_applications = std::max(stats.max_applications, apps);

    if (!converged) {
      if (!retried && window_steps > 1) {
        retried = true;
        window_steps = std::max<long long>(1, window_steps / 2);
        stats.window_length = static_cast<double>(window_steps) * dt;
        continue;  // retry the same stretch with the shorter window
      }
      std::ostringstream os;
      os << "picard_solve: no contraction after " << max_iter
         << " iterations (M3=" << m3 << ", window=" << stats.window_length << ")";
      throw std::runtime_error(os.str());
    }

    const size_t skip = full.times.empty() ? 0 : 1;
    full.times.insert(full.times.end(), candidate.times.begin() + skip,
                      candidate.times.end());
    full.states.insert(full.states.end(),
                       std::make_move_iterator(candidate.states.begin() + skip),
                       std::make_move_iterator(candidate.states.end()));
    chain = full.states.back();
    done += w_steps;
    ++stats.windows;
  }

  return PicardResult{std::move(full), stats};
}

}  // namespace coevo
