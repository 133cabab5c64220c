#pragma once

// Microscopic dipole-sum oracle: retarded pair kernels, cubic-lattice and
// continuum sums of the pair weight, and the two-species cascade that
// reproduces the Lorentz factor.
//
// Lengths are in units of 1/k.  A sum over sites with spacing a is normalized
// by (ka)^3, so it approximates the continuum integral of the pair weight over
// the same region.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "lfbloch/localfield.hpp"
#include "lfbloch/parallel.hpp"
#include "lfbloch/quantities.hpp"

namespace lfbloch {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

struct PairKernelValue {
  cplx f1;  // separation transverse to the dipoles
  cplx f2;  // separation along the dipoles
};

inline PairKernelValue pair_kernel(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("pair_kernel: R must be > 0");
  const cplx e = std::exp(I * r);
  const double r2 = r * r, r3 = r2 * r;
  return {e * (-I / r + I / r3 + 1.0 / r2), e * (-2.0 * I / r3 - 2.0 / r2)};
}

/// Pair weight for dipole directions x_n, x_m and unit separation n_nm.
inline cplx geometric_weight(const Vec3& x_n, const Vec3& x_m, const Vec3& n_nm, double r) {
  for (const Vec3* v : {&x_n, &x_m, &n_nm})
    if (std::abs(v->dot(*v) - 1.0) > 2e-12)
      throw DomainError("geometric_weight: direction vectors must be unit length");
  const auto k = pair_kernel(r);
  const double pm = x_m.dot(n_nm), pn = x_n.dot(n_nm);
  return (x_m.dot(x_n) - pm * pn) * k.f1 + pm * pn * k.f2;
}

enum class Orientation { all_parallel, isotropic_average };

inline std::string_view to_string(Orientation o) {
  return o == Orientation::all_parallel ? "all_parallel" : "isotropic_average";
}

inline Orientation parse_orientation(std::string_view s) {
  if (s == "all_parallel") return Orientation::all_parallel;
  if (s == "isotropic_average") return Orientation::isotropic_average;
  throw DomainError("unknown orientation '" + std::string(s) +
                    "' (expected all_parallel|isotropic_average)");
}

/// Slab |z| <= thickness/2, rho <= radius; axis along z, dipoles along x.
struct Cylinder {
  double thickness = 40.0;
  double radius = 40.0;
};

struct Sphere {
  double radius = 40.0;
};

struct DipoleLatticeSpec {
  std::variant<Cylinder, Sphere> geometry = Cylinder{};
  double lattice_constant = 0.1;
  double exclusion_radius = 1.0;
  Orientation orientation = Orientation::all_parallel;
  double regularization_eta = 0.2;  // largest damping of the Richardson ladder
  int richardson_levels = 8;
  double quadrature_step = 0.5;     // panel width of the inner quadrature
  double tolerance = 1e-6;          // relative agreement of the last two extrapolants

  double min_extent() const {
    if (const auto* c = std::get_if<Cylinder>(&geometry))
      return std::min(c->thickness / 2.0, c->radius);
    return std::get<Sphere>(geometry).radius;
  }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (const auto* c = std::get_if<Cylinder>(&geometry)) {
      if (!positive(c->thickness)) throw DomainError("dipole.thickness: must be > 0");
      if (!positive(c->radius)) throw DomainError("dipole.radius: must be > 0");
    } else if (!positive(std::get<Sphere>(geometry).radius)) {
      throw DomainError("dipole.radius: must be > 0");
    }
    if (!positive(lattice_constant)) throw DomainError("dipole.lattice_constant: must be > 0");
    if (!std::isfinite(exclusion_radius) || exclusion_radius < 0.0)
      throw DomainError("dipole.exclusion_radius: must be >= 0");
    if (exclusion_radius >= min_extent())
      throw DomainError("dipole.exclusion_radius: must be smaller than the geometry");
    if (!std::isfinite(regularization_eta) || regularization_eta < 0.0)
      throw DomainError("dipole.regularization_eta: must be >= 0");
    if (richardson_levels < 1 || richardson_levels > 20)
      throw DomainError("dipole.richardson_levels: must be in [1, 20]");
    if (!positive(quadrature_step)) throw DomainError("dipole.quadrature_step: must be > 0");
    if (!positive(tolerance)) throw DomainError("dipole.tolerance: must be > 0");
  }
};

/// -i 4 pi / 3: the normalized value the dipole sums are compared against.
inline cplx lorentz_sum_target() { return -I * (4.0 * pi / 3.0); }

namespace detail {

struct GaussRule {
  std::array<double, 20> x{};
  std::array<double, 20> w{};
};

inline const GaussRule& gauss20() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 20>;
    GaussRule g;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < 10; ++i) {
      g.x[9 - i] = -a[i];
      g.w[9 - i] = w[i];
      g.x[10 + i] = a[i];
      g.w[10 + i] = w[i];
    }
    return g;
  }();
  return rule;
}

/// Integrates f over [a, b] split into `panels` equal Gauss-Legendre panels.
template <class F>
cplx integrate_panels(F&& f, double a, double b, std::size_t panels) {
  const auto& g = gauss20();
  const double h = (b - a) / static_cast<double>(panels);
  std::vector<cplx> parts(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    cplx s = 0.0;
    for (std::size_t i = 0; i < 20; ++i) s += g.w[i] * f(lo + 0.5 * h * (g.x[i] + 1.0));
    parts[p] = 0.5 * h * s;
  }
  return pairwise_sum(parts);
}

inline std::size_t panel_count(double length, double step) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / step - 1e-12)));
}

// Pair weight integrated over the azimuth around the z axis, at polar
// sin^2(theta) = s.  Dipoles along x for all_parallel.
inline cplx azimuthal_kernel(double r, double s, Orientation o) {
  const auto k = pair_kernel(r);
  if (o == Orientation::isotropic_average) return 2.0 * pi * (2.0 * k.f1 + k.f2) / 3.0;
  return pi * ((2.0 - s) * k.f1 + s * k.f2);
}

// The R^-3 part of azimuthal_kernel.
inline cplx azimuthal_static(double r, double s, Orientation o) {
  if (o == Orientation::isotropic_average) return 0.0;
  return pi * I * (2.0 - 3.0 * s) / (r * r * r);
}

// Integral over the full solid angle: 4 pi (2 F1 + F2) / 3 for either orientation.
inline cplx solid_angle_kernel(double r) { return -8.0 * pi * I / 3.0 * std::exp(I * r) / r; }

// Region r >= delta inside the geometry (both half-spaces), undamped.  The
// static part is integrated in r analytically; its log(delta) piece vanishes
// after the polar integral.
inline cplx inner_region(const DipoleLatticeSpec& spec) {
  const double delta = spec.exclusion_radius;
  const double step = spec.quadrature_step;
  const Orientation o = spec.orientation;

  auto radial = [&](double theta, double rmax) {
    const double s = std::sin(theta) * std::sin(theta);
    const cplx dynamic = integrate_panels(
        [&](double r) { return r * r * (azimuthal_kernel(r, s, o) - azimuthal_static(r, s, o)); },
        delta, rmax, panel_count(rmax - delta, step));
    const cplx stat = o == Orientation::all_parallel
                          ? pi * I * (2.0 - 3.0 * s) * std::log(rmax)
                          : cplx{0.0};
    return std::sin(theta) * (dynamic + stat);
  };

  if (const auto* sph = std::get_if<Sphere>(&spec.geometry)) {
    const double rmax = sph->radius;
    return 2.0 * integrate_panels([&](double t) { return radial(t, rmax); }, 0.0, pi / 2.0,
                                  std::max<std::size_t>(8, panel_count(pi / 2.0, step)));
  }
  const auto& cyl = std::get<Cylinder>(spec.geometry);
  const double half = cyl.thickness / 2.0;
  const double theta_c = std::atan2(cyl.radius, half);
  const double corner = std::hypot(half, cyl.radius);
  // Enough polar panels that rmax(theta) moves by about one step per panel.
  const std::size_t axial_panels =
      std::max<std::size_t>(8, panel_count(corner - half, step));
  const std::size_t side_panels =
      std::max<std::size_t>(8, panel_count(corner - cyl.radius, step));
  const cplx axial = integrate_panels(
      [&](double t) { return radial(t, half / std::cos(t)); }, 0.0, theta_c, axial_panels);
  const cplx side = integrate_panels(
      [&](double t) { return radial(t, cyl.radius / std::sin(t)); }, theta_c, pi / 2.0,
      side_panels);
  return 2.0 * (axial + side);
}

// Cylinder tail rho > R0, |z| <= L/2 with damping exp(-eta (r - R0)).
inline cplx cylinder_tail(const DipoleLatticeSpec& spec, double eta) {
  const auto& cyl = std::get<Cylinder>(spec.geometry);
  const double half = cyl.thickness / 2.0;
  const double r0 = cyl.radius;
  const double span = 40.0 / eta;  // damping below e^-40 beyond
  const double rho_step = 4.0 * spec.quadrature_step;
  const std::size_t rho_panels = panel_count(span, rho_step);
  const double h = span / static_cast<double>(rho_panels);
  const auto& g = gauss20();
  const Orientation o = spec.orientation;

  std::vector<cplx> parts(rho_panels);
  for (std::size_t p = 0; p < rho_panels; ++p) {
    const double lo = r0 + h * static_cast<double>(p);
    // Phase swing of exp(i r) across the z range sets the z resolution.
    const double swing = std::hypot(lo, half) - lo;
    const std::size_t z_panels = 1 + panel_count(swing, 2.0 * spec.quadrature_step);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
      const double rho = lo + 0.5 * h * (g.x[i] + 1.0);
      const cplx column = integrate_panels(
          [&](double z) {
            const double r = std::hypot(rho, z);
            const double s = rho * rho / (r * r);
            return azimuthal_kernel(r, s, o) * std::exp(-eta * (r - r0));
          },
          0.0, half, z_panels);
      acc += g.w[i] * rho * column;
    }
    parts[p] = 0.5 * h * acc;
  }
  return 2.0 * pairwise_sum(parts);
}

}  // namespace detail

struct EtaEstimate {
  double eta = 0.0;
  cplx value;  // inner region plus damped tail
};

struct ContinuumResult {
  cplx value;                     // eta -> 0 extrapolation
  cplx inner;                     // undamped region inside the geometry
  std::vector<EtaEstimate> ladder;
  double extrapolation_change = 0.0;  // |last two diagonal extrapolants|
};

/// Richardson extrapolation to eta = 0 for eta_j = eta0 / 2^j and an error
/// expansion in integer powers of eta.  Returns the diagonal of the tableau.
inline std::vector<cplx> richardson_diagonal(const std::vector<cplx>& values) {
  std::vector<std::vector<cplx>> t(values.size());
  std::vector<cplx> diag;
  for (std::size_t j = 0; j < values.size(); ++j) {
    t[j].push_back(values[j]);
    for (std::size_t k = 1; k <= j; ++k) {
      const double f = std::ldexp(1.0, static_cast<int>(k)) - 1.0;
      t[j].push_back(t[j][k - 1] + (t[j][k - 1] - t[j - 1][k - 1]) / f);
    }
    diag.push_back(t[j].back());
  }
  return diag;
}

// Integral of the pair weight over the geometry minus the ball r < delta,
// normalized to units of 1/k^3.  The cylinder's lateral tail is
// conditionally convergent; it is damped, summed on a ladder of dampings and
// extrapolated.  A sphere is finite and needs no damping.
inline ContinuumResult continuum_cylinder_integral(const DipoleLatticeSpec& spec,
                                                   unsigned jobs = 1) {
  spec.validate();
  ContinuumResult out;
  out.inner = detail::inner_region(spec);
  if (std::holds_alternative<Sphere>(spec.geometry)) {
    out.value = out.inner;
    out.ladder.push_back({0.0, out.inner});
    return out;
  }
  if (!(spec.regularization_eta > 0.0))
    throw DomainError("dipole.regularization_eta: cylinder tail needs eta > 0");

  std::vector<double> etas;
  for (int j = 0; j < spec.richardson_levels; ++j)
    etas.push_back(std::ldexp(spec.regularization_eta, -j));
  const auto tails =
      parallel_map(etas, [&](double eta) { return detail::cylinder_tail(spec, eta); }, jobs);

  std::vector<cplx> values;
  for (std::size_t j = 0; j < etas.size(); ++j) {
    values.push_back(out.inner + tails[j]);
    out.ladder.push_back({etas[j], values.back()});
  }
  const auto diag = richardson_diagonal(values);
  out.value = diag.back();
  if (diag.size() >= 2) {
    out.extrapolation_change = std::abs(diag.back() - diag[diag.size() - 2]);
    if (out.extrapolation_change > spec.tolerance * std::max(1.0, std::abs(out.value)))
      throw ConvergenceError("continuum integral: eta extrapolation not converged (change " +
                             std::to_string(out.extrapolation_change) + ")");
  }
  return out;
}

/// Closed form of the sphere case: the pair weight integrated over
/// delta <= r <= radius.
inline cplx sphere_shell_integral(double delta, double radius) {
  auto prim = [](double r) { return std::exp(I * r) * (1.0 - I * r); };
  return -8.0 * pi * I / 3.0 * (prim(radius) - prim(delta));
}

// ---------------------------------------------------------------------------
// Cubic lattice sums.

/// Static (R^-3) part of the all-parallel pair weight, i (1 - 3 c^2) / R^3,
/// for the lattice vector v in units of the lattice constant, times (ka)^3.
inline cplx static_weight(const Vec3& v) {
  const double r2 = v.dot(v);
  const double c2 = v.x * v.x / r2;
  return I * (1.0 - 3.0 * c2) / (r2 * std::sqrt(r2));
}

/// Normalized static sums over the Chebyshev shells max(|i|,|j|,|k|) = 1..shells
/// of a simple cubic lattice, seen from `observer` (lattice units).  The
/// observer's own site (the origin) is excluded.
inline std::vector<cplx> near_zone_shell_sums(int shells, Vec3 observer = {}) {
  if (shells < 1) throw DomainError("near_zone_shell_sums: shell count must be >= 1");
  std::vector<cplx> out;
  for (int m = 1; m <= shells; ++m) {
    std::vector<cplx> terms;
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j)
        for (int k = -m; k <= m; ++k) {
          if (std::max({std::abs(i), std::abs(j), std::abs(k)}) != m) continue;
          terms.push_back(static_weight(Vec3{double(i), double(j), double(k)} - observer));
        }
    out.push_back(pairwise_sum(terms));
  }
  return out;
}

inline cplx near_zone_cubic_sum(const DipoleLatticeSpec& spec, int shells, Vec3 observer = {}) {
  if (spec.orientation != Orientation::all_parallel)
    throw DomainError("near_zone_cubic_sum: requires all_parallel orientation");
  return pairwise_sum(near_zone_shell_sums(shells, observer));
}

namespace detail {

// C-infinity step: 1 on [0, 1/2], 0 on [1, inf) in units of delta.
inline double near_window(double x) {
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  const double t = 2.0 * x - 1.0;
  const double a = std::exp(-1.0 / (1.0 - t)), b = std::exp(-1.0 / t);
  return a / (a + b);
}

}  // namespace detail

struct NearZoneResult {
  cplx discrete;    // windowed site sum, (ka)^3 normalized
  cplx complement;  // continuum integral of (1 - window) over the ball
  std::size_t sites = 0;

  cplx total() const { return discrete + complement; }
};

// Ball r < delta around the observer: sites weighted by a smooth window that
// falls from 1 at delta/2 to 0 at delta, plus the continuum remainder.  With
// delta below one lattice spacing the site sum is empty.
inline NearZoneResult near_zone_discrete_sum(const DipoleLatticeSpec& spec) {
  spec.validate();
  const double a = spec.lattice_constant;
  const double delta = spec.exclusion_radius;
  NearZoneResult out;
  const int m = static_cast<int>(std::floor(delta / a));
  const Vec3 axis{1.0, 0.0, 0.0};
  std::vector<cplx> planes;
  for (int i = -m; i <= m; ++i) {
    std::vector<cplx> terms;
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const Vec3 v{a * i, a * j, a * k};
        const double r = v.norm();
        if (r >= delta) continue;
        const auto f = pair_kernel(r);
        cplx b;
        if (spec.orientation == Orientation::isotropic_average) {
          b = (2.0 * f.f1 + f.f2) / 3.0;
        } else {
          const double c = axis.dot(v) / r;
          b = (1.0 - c * c) * f.f1 + c * c * f.f2;
        }
        terms.push_back(detail::near_window(r / delta) * b);
        ++out.sites;
      }
    planes.push_back(pairwise_sum(terms));
  }
  out.discrete = a * a * a * pairwise_sum(planes);
  if (delta > 0.0)
    out.complement = detail::integrate_panels(
        [&](double r) {
          return (1.0 - detail::near_window(r / delta)) * r * r * detail::solid_angle_kernel(r);
        },
        0.5 * delta, delta, 32);
  return out;
}

struct LatticeSumResult {
  cplx value;
  NearZoneResult near;
  ContinuumResult far;
};

// Sites are discrete inside the ball r < delta and a continuum outside it,
// so the sum carries the lattice's near-zone structure while the oscillatory
// far zone is handled by the extrapolated continuum integral.
inline LatticeSumResult discrete_lattice_sum(const DipoleLatticeSpec& spec, unsigned jobs = 1) {
  spec.validate();
  LatticeSumResult out;
  out.near = near_zone_discrete_sum(spec);
  out.far = continuum_cylinder_integral(spec, jobs);
  out.value = out.near.total() + out.far.value;
  return out;
}

// ---------------------------------------------------------------------------
// Two-species cascade.

struct CascadeInputs {
  double nu_b = 0.0;        // near dipole-dipole strength of the host species
  double detuning_b = 0.0;  // host resonance minus guest resonance
  double gamma_b = 0.0;     // host linewidth
};

struct CascadeResult {
  cplx alpha;                  // detuning_b - nu_b - i gamma_b / 2
  cplx susceptibility;         // host linear susceptibility
  cplx index_squared;          // 1 + 4 pi chi
  cplx lorentz_emergent;       // 1 + (4 pi / 3) chi
  cplx lorentz_from_index;     // (n^2 + 2) / 3
  double identity_residual = 0.0;
};

inline CascadeResult interspecies_cascade(const CascadeInputs& in) {
  if (!std::isfinite(in.nu_b) || !std::isfinite(in.detuning_b) || !std::isfinite(in.gamma_b))
    throw DomainError("cascade: inputs must be finite");
  CascadeResult out;
  out.alpha = in.detuning_b - in.nu_b - 0.5 * I * in.gamma_b;
  if (std::abs(out.alpha) < 1e-9) throw SingularityError("cascade: resonant host (|alpha| < 1e-9)");
  out.susceptibility = 3.0 / (4.0 * pi) * in.nu_b / out.alpha;
  out.index_squared = 1.0 + 4.0 * pi * out.susceptibility;
  out.lorentz_emergent = 1.0 + 4.0 * pi / 3.0 * out.susceptibility;
  out.lorentz_from_index = (out.index_squared + 2.0) / 3.0;
  out.identity_residual = std::abs(out.lorentz_emergent - out.lorentz_from_index);
  return out;
}

/// Host susceptibility from the bare polarizability x = nu_b / (detuning_b -
/// i gamma_b / 2) resummed with the Clausius-Mossotti factor 1 / (1 - x).
inline cplx clausius_mossotti_susceptibility(const CascadeInputs& in) {
  const cplx x = in.nu_b / (in.detuning_b - 0.5 * I * in.gamma_b);
  if (std::abs(1.0 - x) < 1e-14) throw PolarizationCatastrophe("cascade: 1 - x vanishes");
  return 3.0 / (4.0 * pi) * x / (1.0 - x);
}

/// Host inputs whose cascade reproduces index n (Im n >= 0).
inline CascadeInputs cascade_inputs_for_index(cplx n, double nu_b = 1.0) {
  if (!(nu_b > 0.0)) throw DomainError("cascade: nu_b must be > 0");
  const cplx n2m1 = n * n - 1.0;
  if (std::abs(n2m1) < 1e-15) return {0.0, 1.0, 0.0};
  const cplx alpha = 3.0 * nu_b / n2m1;
  return {nu_b, alpha.real() + nu_b, -2.0 * alpha.imag()};
}

}  // namespace lfbloch
