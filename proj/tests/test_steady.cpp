#include <gtest/gtest.h>

#include <random>

#include "lfbloch/dynamics.hpp"
#include "lfbloch/steady.hpp"

using namespace lfbloch;

namespace {

// Strong near-field coupling, resonant pump: bistable for drives in
// roughly [6.16, 10.05].
SystemParams bistable_params() {
  SystemParams p;
  p.nu = 20.0;
  p.n = 1.0;
  p.delta = 0.0;
  p.gamma_perp = p.gamma_par = 1.0;
  p.w_eq = -1.0;
  return p;
}

// Real roots of c on (lo, hi) from sign changes on a uniform grid, refined by
// bisection.  Independent of the closed-form solver.
std::vector<double> scan_roots(const Cubic& c, double lo, double hi, int n = 200000) {
  std::vector<double> out;
  double x0 = lo, f0 = c(lo);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo + (hi - lo) * i / n;
    const double f1 = c(x1);
    if (f0 == 0.0) out.push_back(x0);
    else if (f0 * f1 < 0.0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = c(m);
        if (fa * fm <= 0.0) b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  return out;
}

// Drive^2 that makes w stationary, from the stationary inversion equation
// solved for the drive.  Its local extrema over w are the fold points.
double drive_squared_at(const SystemParams& p, double w) {
  const double l = std::real(lorentz_factor(p.n));
  const double a = p.nu * l;
  const double det = p.delta - a * w;
  return -p.gamma_par * (w - p.w_eq) * (det * det + p.gamma_perp * p.gamma_perp) /
         (p.gamma_perp * l * l * w);
}

std::vector<double> brute_force_folds(const SystemParams& p) {
  const int n = 100000;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double w = p.w_eq + (0.0 - p.w_eq) * (i + 0.5) / n;
    v[i] = drive_squared_at(p, w);
  }
  std::vector<double> ext;
  for (int i = 1; i + 1 < n; ++i)
    if ((v[i] - v[i - 1]) * (v[i + 1] - v[i]) < 0.0) ext.push_back(std::sqrt(v[i]));
  std::sort(ext.begin(), ext.end());
  return ext;
}

}  // namespace

TEST(RealRoots, KnownPolynomials) {
  // (w - 1)(w - 2)(w - 3)
  auto r = real_roots({1.0, -6.0, 11.0, -6.0});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], 1.0, 1e-12);
  EXPECT_NEAR(r[1], 2.0, 1e-12);
  EXPECT_NEAR(r[2], 3.0, 1e-12);
  // w^3 + w + 1: one real root near -0.6823
  r = real_roots({1.0, 0.0, 1.0, 1.0});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], -0.682327803828019, 1e-12);
  // degenerate leading terms
  r = real_roots({0.0, 2.0, -2.0, -4.0});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], -1.0, 1e-12);
  EXPECT_NEAR(r[1], 2.0, 1e-12);
  r = real_roots({0.0, 0.0, 2.0, 1.0});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], -0.5, 1e-15);
  EXPECT_THROW(real_roots({}), DomainError);
}

TEST(InversionCubic, MatchesStationaryEquationsAtRandomPoints) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    SystemParams p;
    p.n = 1.0 + 2.0 * u(rng);
    p.nu = 10.0 * u(rng);
    p.delta = 6.0 * u(rng) - 3.0;
    p.rabi = cplx(4.0 * u(rng), 4.0 * u(rng) - 2.0);
    p.gamma_perp = 0.2 + u(rng);
    p.gamma_par = 0.2 + u(rng);
    p.w_eq = -u(rng);
    const double w = -u(rng);
    // Solve dR/dt = 0 for R by hand, then evaluate dW/dt.
    const double l = std::real(lorentz_factor(p.n));
    const cplx g = l * p.rabi;
    const double det = p.delta - p.nu * l * w;
    const cplx r = 0.5 * I * g * w / (I * det - p.gamma_perp);
    const BlochState s{r, w};
    const auto d = rhs(ModelKind::classical_lorentz, s, p);
    ASSERT_NEAR(std::abs(d.r21), 0.0, 1e-12);
    const double expected = -d.w * (det * det + p.gamma_perp * p.gamma_perp);
    const double got = inversion_cubic(p)(w);
    EXPECT_NEAR(got, expected, 1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST(SteadyStates, UndrivenRelaxesToEquilibrium) {
  auto p = bistable_params();
  p.w_eq = -0.7;
  p.rabi = 0.0;
  const auto b = steady_states(p);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NEAR(b.w_roots[0], -0.7, 1e-12);
  EXPECT_EQ(b.r21_roots[0], cplx(0.0));
  EXPECT_EQ(b.stability[0], Stability::stable);
}

TEST(SteadyStates, SaturationWithoutNearFieldCoupling) {
  for (double rabi : {0.1, 0.5, 1.0, 3.0}) {
    SystemParams p;
    p.n = 1.4;
    p.gamma_perp = 0.8;
    p.gamma_par = 0.3;
    p.rabi = rabi;
    const double g2 = std::norm(lorentz_factor(p.n) * rabi);
    const double expected = -p.gamma_par * p.gamma_perp / (p.gamma_par * p.gamma_perp + g2);
    const auto b = steady_states(p);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_NEAR(b.w_roots[0], expected, 1e-12);
  }
}

TEST(SteadyStates, ThreeRootsInsideWindow) {
  auto p = bistable_params();
  p.rabi = std::sqrt(60.0);
  const auto b = steady_states(p);
  ASSERT_EQ(b.size(), 3u);
  const auto oracle = scan_roots(inversion_cubic(p), -1.0, 0.0);
  ASSERT_EQ(oracle.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(b.w_roots[i], oracle[i], 1e-9);
  EXPECT_NEAR(b.w_roots[0], -0.8171, 1e-4);
  EXPECT_NEAR(b.w_roots[1], -0.1643, 1e-4);
  EXPECT_NEAR(b.w_roots[2], -0.0186, 1e-4);
  EXPECT_EQ(b.stability[0], Stability::stable);
  EXPECT_EQ(b.stability[1], Stability::unstable);
  EXPECT_EQ(b.stability[2], Stability::stable);
  EXPECT_TRUE(b.discarded.empty());
}

TEST(SteadyStates, EveryRootIsStationaryAndPhysical) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    SystemParams p;
    p.n = 1.0 + u(rng);
    p.nu = 30.0 * u(rng);
    p.delta = 10.0 * u(rng) - 5.0;
    p.rabi = 15.0 * u(rng);
    p.gamma_perp = 0.1 + u(rng);
    p.gamma_par = 0.1 + u(rng);
    p.w_eq = -0.2 - 0.8 * u(rng);
    const auto b = steady_states(p);
    EXPECT_EQ(static_cast<int>(b.size()), steady_root_count(p, std::abs(p.rabi)));
    for (std::size_t k = 0; k < b.size(); ++k) {
      const BlochState s{b.r21_roots[k], b.w_roots[k]};
      EXPECT_LE(steady_residual(p, s), 1e-10 * std::max(1.0, std::norm(p.rabi)));
      EXPECT_GE(s.w, p.w_eq - 1e-12);
      EXPECT_LE(s.w, 1e-12);
      EXPECT_TRUE(s.is_physical());
    }
  }
}

TEST(SteadyStates, Preconditions) {
  auto p = bistable_params();
  p.n = cplx(1.2, 0.1);
  EXPECT_THROW(steady_states(p), DomainError);
  p = bistable_params();
  p.gamma_perp = 0.0;
  EXPECT_THROW(steady_states(p), DomainError);
  p = bistable_params();
  p.gamma_par = 0.0;
  EXPECT_THROW(bistability_region(p, 10.0), DomainError);
}

TEST(HysteresisSweep, RootCountsRiseAndFallByTwo) {
  const auto p = bistable_params();
  std::vector<double> grid;
  for (int i = 0; i <= 300; ++i) grid.push_back(0.05 * i);
  const auto sweep = hysteresis_sweep(p, grid);
  ASSERT_EQ(sweep.size(), grid.size());
  std::vector<int> counts;
  for (const auto& b : sweep) {
    counts.push_back(static_cast<int>(b.size()));
    EXPECT_TRUE(b.size() == 1 || b.size() == 3);
  }
  EXPECT_EQ(counts.front(), 1);
  EXPECT_EQ(counts.back(), 1);
  int changes = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    const int d = counts[i] - counts[i - 1];
    EXPECT_TRUE(d == 0 || d == 2 || d == -2);
    if (d != 0) ++changes;
  }
  EXPECT_EQ(changes, 2);
  for (const auto& b : sweep)
    if (b.size() == 3) {
      EXPECT_EQ(b.stability[1], Stability::unstable);
    }
}

TEST(HysteresisSweep, BranchesAreContinuousAwayFromFolds) {
  const auto p = bistable_params();
  const auto win = bistability_region(p, 15.0).value();
  std::vector<double> grid;
  for (int i = 0; i <= 1500; ++i) grid.push_back(0.01 * i);
  const auto sweep = hysteresis_sweep(p, grid);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const double r0 = grid[i - 1], r1 = grid[i];
    // lower branch exists below the upper fold
    if (r1 < win.rabi_high - 0.05) {
      EXPECT_LT(std::abs(sweep[i].w_roots.front() - sweep[i - 1].w_roots.front()), 0.01) << r1;
    }
    // upper branch exists above the lower fold
    if (r0 > win.rabi_low + 0.05) {
      EXPECT_LT(std::abs(sweep[i].w_roots.back() - sweep[i - 1].w_roots.back()), 0.01) << r1;
    }
  }
}

TEST(HysteresisSweep, ValidatesGridAndIsJobIndependent) {
  const auto p = bistable_params();
  EXPECT_THROW(hysteresis_sweep(p, {1.0, 0.5}), DomainError);
  EXPECT_THROW(hysteresis_sweep(p, {-1.0}), DomainError);
  std::vector<double> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(0.3 * i);
  const auto a = hysteresis_sweep(p, grid, 1);
  const auto b = hysteresis_sweep(p, grid, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].w_roots, b[i].w_roots);
}

TEST(BistabilityRegion, MatchesFoldPointsOfDriveCurve) {
  const auto p = bistable_params();
  const auto win = bistability_region(p, 15.0);
  ASSERT_TRUE(win.has_value());
  const auto folds = brute_force_folds(p);
  ASSERT_EQ(folds.size(), 2u);
  EXPECT_NEAR(win->rabi_low / folds[0], 1.0, 1e-4);
  EXPECT_NEAR(win->rabi_high / folds[1], 1.0, 1e-4);
  EXPECT_NEAR(win->rabi_low, 6.15988825308, 1e-8);
  EXPECT_NEAR(win->rabi_high, 10.0503833872, 1e-8);
}

TEST(BistabilityRegion, AbsentWithoutNearFieldCoupling) {
  auto p = bistable_params();
  p.nu = 0.0;
  EXPECT_FALSE(bistability_region(p, 50.0).has_value());
}

TEST(BistabilityRegion, WidensWithCouplingStrength) {
  double prev = 0.0;
  for (double nu : {12.0, 16.0, 20.0, 25.0, 30.0}) {
    auto p = bistable_params();
    p.nu = nu;
    const auto win = bistability_region(p, 40.0, 4000);
    ASSERT_TRUE(win.has_value()) << nu;
    const double width = win->rabi_high - win->rabi_low;
    EXPECT_GT(width, prev) << nu;
    prev = width;
  }
}

TEST(BistabilityRegion, StableRootsAttractSmallPerturbations) {
  auto p = bistable_params();
  p.rabi = 8.0;
  const auto b = steady_states(p);
  ASSERT_EQ(b.size(), 3u);
  for (std::size_t k = 0; k < 3; k += 2) {
    ASSERT_EQ(b.stability[k], Stability::stable);
    const BlochState target{b.r21_roots[k], b.w_roots[k]};
    const BlochState start{target.r21 + cplx(1e-3, -1e-3), target.w + 1e-3};
    const auto tr = integrate(ModelKind::classical_lorentz, p, start, 20.0 / p.gamma_par, 1e-3,
                              {1000});
    const auto& e = tr.states.back();
    EXPECT_LT(std::abs(e.r21 - target.r21) + std::abs(e.w - target.w), 1e-6) << k;
  }
}

TEST(SteadyTable, Columns) {
  auto p = bistable_params();
  p.rabi = 8.0;
  const auto t = steady_table({steady_states(p)}, {});
  EXPECT_EQ(t.columns, (std::vector<std::string>{"rabi", "root_index", "w", "abs_r21", "stability"}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[1][4], "unstable");
}
