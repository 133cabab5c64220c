#pragma once

// The four equation-of-motion variants for dense two-level atoms in a host.
//
// All variants share one algebraic shape,
//
//   dR/dt = i(Delta - nu s W) R - (i/2) f Omega W - G_perp R - c nu W R
//   dW/dt = -i[(f Omega)^* R - f Omega R^*] - G_par (W - W_t) - 4 d nu |R|^2
//
// and differ only in the coefficient set (s, f, G_perp, G_par, W_t, c, d).
// model_coefficients() is the only model-specific code.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "lfbloch/localfield.hpp"
#include "lfbloch/quantities.hpp"

namespace lfbloch {

enum class ModelKind {
  classical_lorentz,
  macroscopic_qed,
  macroscopic_qed_local_field,
  microscopic_qed,
};

inline constexpr std::array<ModelKind, 4> all_models{
    ModelKind::classical_lorentz, ModelKind::macroscopic_qed,
    ModelKind::macroscopic_qed_local_field, ModelKind::microscopic_qed};

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::classical_lorentz: return "classical";
    case ModelKind::macroscopic_qed: return "macro";
    case ModelKind::macroscopic_qed_local_field: return "macro_ll";
    case ModelKind::microscopic_qed: return "micro";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (auto k : all_models)
    if (to_string(k) == s) return k;
  throw DomainError("unknown model '" + std::string(s) + "' (expected classical|macro|macro_ll|micro)");
}

// Sign of the Im(l) coherence term of the microscopic model.  `minus` keeps
// -nu Im(l) W R; `plus` uses +nu Im(l) W R, which is what expanding
// -i l nu W R with complex l gives.
enum class SignConvention { minus, plus };

inline std::string_view to_string(SignConvention s) {
  return s == SignConvention::minus ? "minus" : "plus";
}

inline SignConvention parse_sign_convention(std::string_view s) {
  if (s == "minus") return SignConvention::minus;
  if (s == "plus") return SignConvention::plus;
  throw DomainError("unknown sign convention '" + std::string(s) + "' (expected minus|plus)");
}

struct ModelCoefficients {
  cplx shift_factor{1.0, 0.0};
  cplx field_factor{1.0, 0.0};
  double transverse_decay = 0.0;
  double longitudinal_decay = 0.0;
  double w_relax_target = -1.0;
  double extra_coherence_damp = 0.0;
  double extra_inversion_damp = 0.0;

  /// Complex shift seen by the coherence: s - i c.
  cplx effective_shift() const { return shift_factor - I * extra_coherence_damp; }
};

inline ModelCoefficients model_coefficients(ModelKind kind, const SystemParams& p,
                                            SignConvention sign = SignConvention::minus) {
  const cplx l = lorentz_factor(p.n);
  ModelCoefficients c;
  switch (kind) {
    case ModelKind::classical_lorentz:
      c.shift_factor = l;
      c.field_factor = l;
      c.transverse_decay = p.gamma_perp;
      c.longitudinal_decay = p.gamma_par;
      c.w_relax_target = p.w_eq;
      c.extra_inversion_damp = l.imag();
      break;
    case ModelKind::macroscopic_qed:
      c.shift_factor = p.n;
      c.field_factor = 1.0;
      c.transverse_decay = p.n.real() * p.gamma0 / 2.0;
      c.longitudinal_decay = p.n.real() * p.gamma0;
      break;
    case ModelKind::macroscopic_qed_local_field: {
      const cplx scale = p.n * l * l;
      c.shift_factor = scale;
      c.field_factor = l;
      c.transverse_decay = scale.real() * p.gamma0 / 2.0;
      c.longitudinal_decay = scale.real() * p.gamma0;
      break;
    }
    case ModelKind::microscopic_qed:
      c.shift_factor = l.real();
      c.field_factor = l;
      c.extra_coherence_damp = sign == SignConvention::minus ? l.imag() : -l.imag();
      c.extra_inversion_damp = l.imag();
      break;
  }
  return c;
}

/// The generic kernel.  `rabi` is the bare Rabi frequency at the current time.
inline BlochState bloch_rhs(const ModelCoefficients& c, const BlochState& s, double nu,
                            double delta, cplx rabi) {
  const cplx g = c.field_factor * rabi;
  BlochState d;
  d.r21 = I * (delta - nu * c.shift_factor * s.w) * s.r21 - 0.5 * I * g * s.w -
          c.transverse_decay * s.r21 - c.extra_coherence_damp * nu * s.w * s.r21;
  d.w = 2.0 * (std::conj(g) * s.r21).imag() - c.longitudinal_decay * (s.w - c.w_relax_target) -
        4.0 * c.extra_inversion_damp * nu * std::norm(s.r21);
  return d;
}

/// A fully specified right-hand side: coefficients, drive, and an optional
/// time-dependent Rabi envelope that replaces the constant drive.
struct BlochModel {
  ModelCoefficients coefficients;
  double nu = 0.0;
  double delta = 0.0;
  cplx rabi{0.0, 0.0};
  std::function<cplx(double)> envelope;

  cplx drive(double t) const { return envelope ? envelope(t) : rabi; }

  BlochState operator()(double t, const BlochState& s) const {
    return bloch_rhs(coefficients, s, nu, delta, drive(t));
  }

  bool lossless() const {
    return coefficients.transverse_decay == 0.0 && coefficients.longitudinal_decay == 0.0;
  }
};

inline BlochModel make_model(ModelKind kind, const SystemParams& p,
                             SignConvention sign = SignConvention::minus) {
  return {model_coefficients(kind, p, sign), p.nu, p.delta, p.rabi, {}};
}

inline BlochState rhs(ModelKind kind, const BlochState& s, const SystemParams& p, double t = 0.0,
                      SignConvention sign = SignConvention::minus) {
  return make_model(kind, p, sign)(t, s);
}

struct FactorRow {
  ModelKind kind;
  cplx shift;
  cplx field;
  // Multiplier of Gamma0 in the decay rates; empty for phenomenological rates.
  std::optional<double> decay_scaling;
};

inline std::array<FactorRow, 4> factor_table(const SystemParams& p,
                                             SignConvention sign = SignConvention::minus) {
  std::array<FactorRow, 4> rows{};
  const cplx l = lorentz_factor(p.n);
  for (std::size_t i = 0; i < all_models.size(); ++i) {
    const auto k = all_models[i];
    const auto c = model_coefficients(k, p, sign);
    std::optional<double> scaling;
    switch (k) {
      case ModelKind::classical_lorentz: break;
      case ModelKind::macroscopic_qed: scaling = p.n.real(); break;
      case ModelKind::macroscopic_qed_local_field: scaling = (p.n * l * l).real(); break;
      case ModelKind::microscopic_qed: scaling = 0.0; break;
    }
    rows[i] = {k, c.effective_shift(), c.field_factor, scaling};
  }
  return rows;
}

}  // namespace lfbloch
