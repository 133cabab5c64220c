#pragma once

// Fixed-step RK4 integration of a Bloch kernel, conservation monitoring, and
// observable extraction from trajectories.

#include <cmath>
#include <cstddef>
#include <utility>
#include <string>
#include <vector>

#include "lfbloch/bloch_models.hpp"
#include "lfbloch/io.hpp"

namespace lfbloch {

struct Trajectory {
  std::vector<double> times;
  std::vector<BlochState> states;
  std::vector<double> residuals;
  double reference_population = 1.0;
  // True when every loss channel is off and l is real, so residuals should
  // stay at round-off level.
  bool conservation_expected = false;

  std::size_t size() const { return times.size(); }

  double max_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, r);
    return m;
  }
};

inline double conservation_residual(const BlochState& s, double reference) {
  return std::abs(s.population() - reference);
}

inline BlochState axpy(double a, const BlochState& x, const BlochState& y) {
  return {y.r21 + a * x.r21, y.w + a * x.w};
}

template <class Rhs>
BlochState rk4_step(const Rhs& f, double t, const BlochState& y, double h) {
  const BlochState k1 = f(t, y);
  const BlochState k2 = f(t + 0.5 * h, axpy(0.5 * h, k1, y));
  const BlochState k3 = f(t + 0.5 * h, axpy(0.5 * h, k2, y));
  const BlochState k4 = f(t + h, axpy(h, k3, y));
  return {y.r21 + h / 6.0 * (k1.r21 + 2.0 * k2.r21 + 2.0 * k3.r21 + k4.r21),
          y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

struct IntegrationOptions {
  std::size_t stride = 1;  // keep every stride-th step (the last step is always kept)
};

// Integrates from t = 0 to t_end with ceil(t_end / dt) equal steps, so the
// final sample lands exactly on t_end.  The t = 0 state is sample zero.
template <class Rhs>
Trajectory integrate(const Rhs& f, const BlochState& initial, double t_end, double dt,
                     IntegrationOptions opts = {}) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrate: dt must be > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw DomainError("integrate: t_end must be >= dt");
  if (opts.stride == 0) throw DomainError("integrate: stride must be >= 1");
  if (!initial.is_finite()) throw DomainError("integrate: non-finite initial state");

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);

  Trajectory tr;
  tr.reference_population = initial.population();
  const std::size_t samples = steps / opts.stride + 2;
  tr.times.reserve(samples);
  tr.states.reserve(samples);
  tr.residuals.reserve(samples);
  auto record = [&](double t, const BlochState& s) {
    tr.times.push_back(t);
    tr.states.push_back(s);
    tr.residuals.push_back(conservation_residual(s, tr.reference_population));
  };

  record(0.0, initial);
  BlochState y = initial;
  double t_prev = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const BlochState next = rk4_step(f, t_prev, y, h);
    if (!next.is_finite())
      throw IntegrationDiverged("integration diverged: non-finite state", t_prev);
    y = next;
    const double t = i == steps ? t_end : h * static_cast<double>(i);
    if (i % opts.stride == 0 || i == steps) record(t, y);
    t_prev = t;
  }
  return tr;
}

inline Trajectory integrate(ModelKind kind, const SystemParams& params, const BlochState& initial,
                            double t_end, double dt, IntegrationOptions opts = {},
                            SignConvention sign = SignConvention::minus) {
  params.validate();
  const BlochModel model = make_model(kind, params, sign);
  Trajectory tr = integrate(model, initial, t_end, dt, opts);
  tr.conservation_expected = model.lossless() && params.n.imag() == 0.0;
  return tr;
}

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw UnmeasurableError("regression needs at least two distinct times");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

inline void require_measurable_coherence(const Trajectory& tr) {
  if (tr.size() < 2) throw UnmeasurableError("trajectory too short");
  for (const auto& s : tr.states)
    if (std::abs(s.r21) < 1e-12) throw UnmeasurableError("|r21| below 1e-12; phase undefined");
}

}  // namespace detail

/// Mean angular velocity of arg(r21), by regression on the unwrapped phase.
inline double extract_phase_velocity(const Trajectory& tr) {
  detail::require_measurable_coherence(tr);
  std::vector<double> phase(tr.size());
  double offset = 0.0;
  double prev = std::arg(tr.states[0].r21);
  phase[0] = prev;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double a = std::arg(tr.states[i].r21);
    double jump = a - prev;
    if (jump > pi) offset -= 2.0 * pi;
    if (jump < -pi) offset += 2.0 * pi;
    phase[i] = a + offset;
    prev = a;
  }
  return detail::least_squares(tr.times, phase).slope;
}

/// Realized frequency shift (phase velocity minus the pump detuning).  For a
/// drive-free, decay-free run with inversion W this equals -nu Re(s) W.
inline double extract_shift(const Trajectory& tr, double delta) {
  return extract_phase_velocity(tr) - delta;
}

/// Exponential growth rate of |r21| by regression on log|r21|.
inline double extract_growth_rate(const Trajectory& tr) {
  detail::require_measurable_coherence(tr);
  std::vector<double> logs(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) logs[i] = std::log(std::abs(tr.states[i].r21));
  return detail::least_squares(tr.times, logs).slope;
}

// Angular frequency of the inversion oscillation, from the spacing of the
// first and last downward crossings of the mid-level (linear interpolation).
inline double extract_rabi_frequency(const Trajectory& tr) {
  if (tr.size() < 3) throw UnmeasurableError("trajectory too short");
  double lo = tr.states[0].w, hi = lo;
  for (const auto& s : tr.states) {
    lo = std::min(lo, s.w);
    hi = std::max(hi, s.w);
  }
  if (hi - lo < 1e-9) throw UnmeasurableError("inversion does not oscillate");
  const double mid = 0.5 * (hi + lo);
  std::vector<double> crossings;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double a = tr.states[i - 1].w - mid;
    const double b = tr.states[i].w - mid;
    if (a > 0.0 && b <= 0.0) {
      const double frac = a / (a - b);
      crossings.push_back(tr.times[i - 1] + frac * (tr.times[i] - tr.times[i - 1]));
    }
  }
  if (crossings.size() < 2) throw UnmeasurableError("fewer than two full Rabi periods");
  const double period =
      (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  return 2.0 * pi / period;
}

inline Table trajectory_table(const Trajectory& tr, Metadata meta) {
  Table t{std::move(meta), {"t", "re_r21", "im_r21", "w", "residual"}, {}};
  t.rows.reserve(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& s = tr.states[i];
    t.rows.push_back({format_double(tr.times[i]), format_double(s.r21.real()),
                      format_double(s.r21.imag()), format_double(s.w),
                      format_double(tr.residuals[i])});
  }
  return t;
}

}  // namespace lfbloch
