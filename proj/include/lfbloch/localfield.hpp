#pragma once

// Closed-form local-field and dielectric renormalization factors.

#include <cmath>
#include <complex>
#include <type_traits>

#include "lfbloch/quantities.hpp"

namespace lfbloch {

/// Lorentz local-field enhancement (n^2 + 2) / 3.
template <class T>
T lorentz_factor(const T& n) {
  return (n * n + T(2)) / T(3);
}

/// Onsager real-cavity factor 3 n^2 / (2 n^2 + 1).
template <class T>
T onsager_factor(const T& n) {
  const T den = T(2) * n * n + T(1);
  if (std::abs(den) < 1e-14) throw SingularityError("onsager_factor: 2n^2 + 1 vanishes");
  return T(3) * n * n / den;
}

/// Dielectric constant from x = (4 pi / 3) p N_d.
inline double clausius_mossotti(double x) {
  if (!std::isfinite(x)) throw DomainError("clausius_mossotti: non-finite input");
  if (x >= 1.0) throw PolarizationCatastrophe("clausius_mossotti: (4pi/3) p N >= 1");
  return (1.0 + 2.0 * x) / (1.0 - x);
}

inline cplx clausius_mossotti(cplx x) {
  if (std::abs(1.0 - x) < 1e-14) throw PolarizationCatastrophe("clausius_mossotti: 1 - x vanishes");
  return (1.0 + 2.0 * x) / (1.0 - x);
}

/// (eps - 1) / (eps + 2); inverse of clausius_mossotti.
template <class T>
T clausius_mossotti_parameter(const T& eps) {
  if (std::abs(eps + T(2)) < 1e-14) throw SingularityError("eps + 2 vanishes");
  return (eps - T(1)) / (eps + T(2));
}

struct EnhancementFactors {
  cplx lorentz;
  cplx onsager;
  cplx index;
};

inline EnhancementFactors enhancement_factors(cplx n) {
  return {lorentz_factor(n), onsager_factor(n), n};
}

// Polarization envelope P = (eps-1)/(4pi) E + ((eps+2)/3) 2 N mu R21 expressed
// as a Lorentz reaction field in Rabi units, (4pi/3)(mu/hbar) P.  With
// Omega = mu E / hbar and nu = 4 pi N mu^2 / (3 hbar) this is
//   (eps - 1)/3 * Omega + 2 l nu R21.
inline cplx polarization_envelope(cplx rabi_field, cplx r21, const SystemParams& params) {
  const cplx eps = params.n * params.n;
  return (eps - 1.0) / 3.0 * rabi_field + 2.0 * lorentz_factor(params.n) * params.nu * r21;
}

/// Rabi frequency of the local field E + (4pi/3) P.
inline cplx local_field(cplx rabi_field, cplx r21, const SystemParams& params) {
  return rabi_field + polarization_envelope(rabi_field, r21, params);
}

namespace detail {
inline void require_index_at_least_one(double n) {
  if (!std::isfinite(n) || n < 1.0) throw DomainError("refractive index must be real and >= 1");
}
}  // namespace detail

/// Gamma / Gamma0 = n l^2 in the Lorentz virtual-cavity model.
inline double decay_virtual_cavity(double n) {
  detail::require_index_at_least_one(n);
  const double l = lorentz_factor(n);
  return n * l * l;
}

/// Gamma / Gamma0 = n (3n^2/(2n^2+1))^2 in the Onsager real-cavity model.
inline double decay_real_cavity(double n) {
  detail::require_index_at_least_one(n);
  const double f = onsager_factor(n);
  return n * f * f;
}

}  // namespace lfbloch
