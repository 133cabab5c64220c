#pragma once

// Domain types and the physical <-> dimensionless conversion layer.
//
// Every dynamical quantity in the library is measured in units of a reference
// rate (the dephasing rate gamma_perp of the atoms).  Gaussian (CGS) constants
// appear only in this header.

#include <cmath>
#include <complex>
#include <string>

#include "lfbloch/errors.hpp"

namespace lfbloch {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

namespace cgs {
inline constexpr double hbar = 1.054571817e-27;  // erg s
inline constexpr double c = 2.99792458e10;       // cm / s
}  // namespace cgs

/// Spatially averaged two-level state in the frame rotating with the pump:
/// coherence envelope R21 and inversion W = R22 - R11.
struct BlochState {
  cplx r21{0.0, 0.0};
  double w = -1.0;

  /// W^2 + 4|R21|^2; equals 1 for a pure state.
  double population() const { return w * w + 4.0 * std::norm(r21); }

  bool is_physical(double tol = 1e-9) const {
    return std::abs(w) <= 1.0 + tol && std::abs(r21) <= 0.5 + tol &&
           population() <= 1.0 + tol;
  }

  bool is_finite() const {
    return std::isfinite(w) && std::isfinite(r21.real()) && std::isfinite(r21.imag());
  }
};

inline BlochState ground_state() { return {}; }

/// Dimensionless inputs of the Bloch kernels.  Rates and frequencies are in
/// units of the reference dephasing rate.
struct SystemParams {
  cplx n{1.0, 0.0};        // host refractive index
  double nu = 0.0;         // near dipole-dipole strength 4 pi N mu^2 / (3 hbar)
  double delta = 0.0;      // pump detuning omega_p - omega_a
  cplx rabi{0.0, 0.0};     // bare Rabi frequency mu E / hbar
  double gamma_perp = 1.0; // phenomenological dephasing (time unit when 1)
  double gamma_par = 1.0;  // phenomenological population relaxation
  double w_eq = -1.0;      // equilibrium inversion
  double gamma0 = 0.0;     // vacuum spontaneous emission rate

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(n.real()) || !finite(n.imag()))
      throw DomainError("params.n: must be finite");
    if (n.imag() < 0.0) throw DomainError("params.n: Im(n) must be >= 0 (passive host)");
    if (!finite(nu) || nu < 0.0) throw DomainError("params.nu: must be finite and >= 0");
    if (!finite(delta)) throw DomainError("params.delta: must be finite");
    if (!finite(rabi.real()) || !finite(rabi.imag()))
      throw DomainError("params.rabi: must be finite");
    if (!finite(gamma_perp) || gamma_perp < 0.0)
      throw DomainError("params.gamma_perp: must be finite and >= 0");
    if (!finite(gamma_par) || gamma_par < 0.0)
      throw DomainError("params.gamma_par: must be finite and >= 0");
    if (!finite(w_eq) || w_eq < -1.0 || w_eq > 0.0)
      throw DomainError("params.w_eq: must lie in [-1, 0]");
    if (!finite(gamma0) || gamma0 < 0.0)
      throw DomainError("params.gamma0: must be finite and >= 0");
  }
};

/// Gaussian-unit description of one atomic species.
struct PhysicalInputs {
  double dipole_moment = 0.0;                 // statC cm
  double number_density = 0.0;                // cm^-3
  double transition_angular_frequency = 0.0;  // rad / s

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(dipole_moment)) throw DomainError("physical.dipole_moment: must be > 0");
    if (!positive(number_density)) throw DomainError("physical.number_density: must be > 0");
    if (!positive(transition_angular_frequency))
      throw DomainError("physical.transition_angular_frequency: must be > 0");
  }
};

namespace detail {
inline void require_non_negative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) throw DomainError(std::string(what) + ": must be finite and >= 0");
}
}  // namespace detail

/// Near dipole-dipole (Lorentz) frequency 4 pi N mu^2 / (3 hbar), rad/s.
inline double ndd_strength(const PhysicalInputs& p) {
  detail::require_non_negative(p.dipole_moment, "dipole_moment");
  detail::require_non_negative(p.number_density, "number_density");
  return 4.0 * pi * p.number_density * p.dipole_moment * p.dipole_moment / (3.0 * cgs::hbar);
}

/// Vacuum spontaneous emission rate 4 omega^3 mu^2 / (3 hbar c^3), rad/s.
inline double vacuum_decay_rate(const PhysicalInputs& p) {
  detail::require_non_negative(p.dipole_moment, "dipole_moment");
  detail::require_non_negative(p.transition_angular_frequency, "transition_angular_frequency");
  const double w = p.transition_angular_frequency;
  return 4.0 * w * w * w * p.dipole_moment * p.dipole_moment /
         (3.0 * cgs::hbar * cgs::c * cgs::c * cgs::c);
}

struct DimensionlessRates {
  double nu = 0.0;
  double gamma0 = 0.0;
};

inline DimensionlessRates to_dimensionless(const PhysicalInputs& p, double reference_rate) {
  p.validate();
  if (!std::isfinite(reference_rate) || reference_rate <= 0.0)
    throw DomainError("reference_rate: must be > 0");
  return {ndd_strength(p) / reference_rate, vacuum_decay_rate(p) / reference_rate};
}

// Inverse of to_dimensionless.  The dipole moment is not recoverable from the
// two rates alone, so it is supplied.
inline PhysicalInputs from_dimensionless(const DimensionlessRates& r, double dipole_moment,
                                         double reference_rate) {
  if (!std::isfinite(dipole_moment) || dipole_moment <= 0.0)
    throw DomainError("dipole_moment: must be > 0");
  if (!std::isfinite(reference_rate) || reference_rate <= 0.0)
    throw DomainError("reference_rate: must be > 0");
  const double mu2 = dipole_moment * dipole_moment;
  PhysicalInputs p;
  p.dipole_moment = dipole_moment;
  p.number_density = 3.0 * cgs::hbar * r.nu * reference_rate / (4.0 * pi * mu2);
  p.transition_angular_frequency =
      std::cbrt(3.0 * cgs::hbar * cgs::c * cgs::c * cgs::c * r.gamma0 * reference_rate / (4.0 * mu2));
  return p;
}

inline SystemParams with_physical(SystemParams base, const PhysicalInputs& p, double reference_rate) {
  const auto r = to_dimensionless(p, reference_rate);
  base.nu = r.nu;
  base.gamma0 = r.gamma0;
  return base;
}

}  // namespace lfbloch
