#pragma once

// Steady states of the classical local-field model with real l.
//
// Eliminating R21 from the stationary equations leaves a real cubic in W,
//   g_par (W - W_eq) ((Delta - a W)^2 + g_perp^2) + |l Omega|^2 g_perp W = 0,
// with a = nu l.  For W_eq < 0 every real root lies in (W_eq, 0), so the
// number of physical steady states is 3 exactly when the discriminant is
// positive.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lfbloch/bloch_models.hpp"
#include "lfbloch/io.hpp"
#include "lfbloch/parallel.hpp"

namespace lfbloch {

/// c3 W^3 + c2 W^2 + c1 W + c0.
struct Cubic {
  double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;

  double operator()(double w) const { return ((c3 * w + c2) * w + c1) * w + c0; }
  double derivative(double w) const { return (3.0 * c3 * w + 2.0 * c2) * w + c1; }

  double discriminant() const {
    return 18.0 * c3 * c2 * c1 * c0 - 4.0 * c2 * c2 * c2 * c0 + c2 * c2 * c1 * c1 -
           4.0 * c3 * c1 * c1 * c1 - 27.0 * c3 * c3 * c0 * c0;
  }
};

namespace detail {

inline void require_steady_preconditions(const SystemParams& p) {
  p.validate();
  if (p.n.imag() != 0.0) throw DomainError("steady: requires real n (real l)");
  if (!(p.gamma_perp > 0.0)) throw DomainError("steady: requires gamma_perp > 0");
  if (!(p.gamma_par > 0.0)) throw DomainError("steady: requires gamma_par > 0");
}

inline double polish(const Cubic& c, double w) {
  for (int it = 0; it < 4; ++it) {
    const double d = c.derivative(w);
    if (d == 0.0) break;
    const double step = c(w) / d;
    if (!std::isfinite(step)) break;
    w -= step;
  }
  return w;
}

}  // namespace detail

inline Cubic inversion_cubic(const SystemParams& p) {
  const double l = lorentz_factor(p.n.real());
  const double a = p.nu * l;
  const double g2 = l * l * std::norm(p.rabi);
  const double d = p.delta;
  const double gp = p.gamma_perp;
  const double gl = p.gamma_par;
  const double we = p.w_eq;
  return {gl * a * a, -gl * (2.0 * d * a + we * a * a),
          gl * (d * d + gp * gp + 2.0 * d * a * we) + g2 * gp, -gl * we * (d * d + gp * gp)};
}

/// Real roots in ascending order, each Newton-polished.  Degrades to the
/// quadratic / linear formula when the leading coefficients vanish.
inline std::vector<double> real_roots(const Cubic& c) {
  const double scale = std::max({std::abs(c.c3), std::abs(c.c2), std::abs(c.c1), std::abs(c.c0)});
  if (scale == 0.0) throw DomainError("real_roots: zero polynomial");
  std::vector<double> roots;
  if (std::abs(c.c3) <= 1e-14 * scale) {
    if (std::abs(c.c2) <= 1e-14 * scale) {
      if (c.c1 == 0.0) return roots;
      roots.push_back(-c.c0 / c.c1);
    } else {
      const double disc = c.c1 * c.c1 - 4.0 * c.c2 * c.c0;
      if (disc >= 0.0) {
        const double q = -0.5 * (c.c1 + std::copysign(std::sqrt(disc), c.c1));
        roots.push_back(q / c.c2);
        if (q != 0.0) roots.push_back(c.c0 / q);
      }
    }
  } else {
    const double b = c.c2 / c.c3, cc = c.c1 / c.c3, d = c.c0 / c.c3;
    const double p = cc - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const double shift = -b / 3.0;
    if (disc > 0.0) {
      const double s = std::sqrt(disc);
      roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) + shift);
    } else if (p == 0.0) {
      roots.push_back(shift);
    } else {
      const double r = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * pi * k / 3.0) + shift);
    }
  }
  for (double& w : roots) w = detail::polish(c, w);
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// R21 that makes dR/dt vanish at inversion w.
inline cplx coherence_at(const SystemParams& p, double w) {
  const double l = lorentz_factor(p.n.real());
  const cplx g = l * p.rabi;
  return (0.5 * g * w) / ((p.delta - p.nu * l * w) + I * p.gamma_perp);
}

/// Jacobian of (Re R21, Im R21, W) for the classical model with real l.
inline std::array<std::array<double, 3>, 3> jacobian(const SystemParams& p, const BlochState& s) {
  const double l = lorentz_factor(p.n.real());
  const double a = p.nu * l;
  const cplx g = l * p.rabi;
  const double x = s.r21.real(), y = s.r21.imag();
  const double det = p.delta - a * s.w;
  return {{{-p.gamma_perp, -det, a * y + 0.5 * g.imag()},
           {det, -p.gamma_perp, -a * x - 0.5 * g.real()},
           {-2.0 * g.imag(), 2.0 * g.real(), -p.gamma_par}}};
}

/// Routh-Hurwitz test on det(lambda - J) = lambda^3 + p1 lambda^2 + p2 lambda + p3.
inline bool is_linearly_stable(const std::array<std::array<double, 3>, 3>& j) {
  const double trace = j[0][0] + j[1][1] + j[2][2];
  const double minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] + j[0][0] * j[2][2] -
                        j[0][2] * j[2][0] + j[1][1] * j[2][2] - j[1][2] * j[2][1];
  const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                     j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                     j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
  const double p1 = -trace, p2 = minors, p3 = -det;
  return p1 > 0.0 && p3 > 0.0 && p1 * p2 > p3;
}

enum class Stability { stable, unstable };

inline std::string_view to_string(Stability s) {
  return s == Stability::stable ? "stable" : "unstable";
}

struct SteadyBranch {
  double rabi = 0.0;  // |Omega| of this branch
  std::vector<double> w_roots;
  std::vector<cplx> r21_roots;
  std::vector<Stability> stability;
  // Real roots of the cubic rejected as unphysical or failing verification.
  std::vector<double> discarded;

  std::size_t size() const { return w_roots.size(); }
};

inline double steady_residual(const SystemParams& p, const BlochState& s) {
  const BlochState d = rhs(ModelKind::classical_lorentz, s, p);
  return std::max(std::abs(d.r21), std::abs(d.w));
}

inline SteadyBranch steady_states(const SystemParams& p) {
  detail::require_steady_preconditions(p);
  SteadyBranch out;
  out.rabi = std::abs(p.rabi);
  const Cubic c = inversion_cubic(p);
  const double tol = 1e-10 * std::max({1.0, std::norm(p.rabi), p.gamma_par});
  for (double w : real_roots(c)) {
    if (!(w >= -1.0 - 1e-12 && w <= 1e-12)) {
      out.discarded.push_back(w);
      continue;
    }
    const BlochState s{coherence_at(p, w), w};
    if (steady_residual(p, s) > tol) {
      out.discarded.push_back(w);
      continue;
    }
    out.w_roots.push_back(w);
    out.r21_roots.push_back(s.r21);
    out.stability.push_back(is_linearly_stable(jacobian(p, s)) ? Stability::stable
                                                               : Stability::unstable);
  }
  if (out.w_roots.empty()) throw EmptyBranchError("steady: no root in [-1, 0]");
  return out;
}

inline std::vector<SteadyBranch> hysteresis_sweep(const SystemParams& p,
                                                  const std::vector<double>& rabi_grid,
                                                  unsigned jobs = 1) {
  detail::require_steady_preconditions(p);
  for (std::size_t i = 0; i < rabi_grid.size(); ++i) {
    if (!std::isfinite(rabi_grid[i]) || rabi_grid[i] < 0.0)
      throw DomainError("hysteresis_sweep: drive values must be finite and >= 0");
    if (i > 0 && rabi_grid[i] < rabi_grid[i - 1])
      throw DomainError("hysteresis_sweep: drive grid must be sorted ascending");
  }
  return parallel_map(
      rabi_grid,
      [&](double r) {
        SystemParams q = p;
        q.rabi = r;
        return steady_states(q);
      },
      jobs);
}

/// Number of physical steady states at drive |Omega| = rabi (1 or 3).
inline int steady_root_count(const SystemParams& p, double rabi) {
  SystemParams q = p;
  q.rabi = rabi;
  return inversion_cubic(q).discriminant() > 0.0 ? 3 : 1;
}

struct BistableWindow {
  double rabi_low = 0.0;
  double rabi_high = 0.0;
};

// Scans [0, rabi_max] on scan_points equally spaced drives for three-root
// points, then bisects both boundaries.  Returns nothing when monostable on the
// scan.  A window narrower than the scan spacing can be missed.
inline std::optional<BistableWindow> bistability_region(const SystemParams& p, double rabi_max,
                                                        std::size_t scan_points = 2000) {
  detail::require_steady_preconditions(p);
  if (!(rabi_max > 0.0) || !std::isfinite(rabi_max))
    throw DomainError("bistability_region: rabi_max must be > 0");
  if (scan_points < 2) throw DomainError("bistability_region: scan_points must be >= 2");

  const double h = rabi_max / static_cast<double>(scan_points - 1);
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < scan_points; ++i) {
    if (steady_root_count(p, h * static_cast<double>(i)) == 3) {
      if (!first) first = i;
      last = i;
    }
  }
  if (!first) return std::nullopt;

  // lo has `lo_count` roots, hi the other count.
  auto bisect = [&](double lo, double hi) {
    const int lo_count = steady_root_count(p, lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (steady_root_count(p, mid) == lo_count ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  BistableWindow win;
  win.rabi_low = *first == 0 ? 0.0 : bisect(h * static_cast<double>(*first - 1), h * static_cast<double>(*first));
  win.rabi_high = *last + 1 == scan_points
                      ? rabi_max
                      : bisect(h * static_cast<double>(*last), h * static_cast<double>(*last + 1));
  return win;
}

inline Table steady_table(const std::vector<SteadyBranch>& branches, Metadata meta) {
  Table t{std::move(meta), {"rabi", "root_index", "w", "abs_r21", "stability"}, {}};
  for (const auto& b : branches)
    for (std::size_t i = 0; i < b.size(); ++i)
      t.rows.push_back({format_double(b.rabi), std::to_string(i), format_double(b.w_roots[i]),
                        format_double(std::abs(b.r21_roots[i])),
                        std::string(to_string(b.stability[i]))});
  return t;
}

}  // namespace lfbloch
