#include <gtest/gtest.h>

#include <random>

#include "lfbloch/localfield.hpp"

using namespace lfbloch;

TEST(LorentzFactor, VacuumAndSimpleValues) {
  EXPECT_EQ(lorentz_factor(1.0), 1.0);
  EXPECT_EQ(lorentz_factor(2.0), 2.0);
  EXPECT_NEAR(lorentz_factor(1.5), 4.25 / 3.0, 1e-15);
}

TEST(LorentzFactor, ComplexIndexMatchesComponentArithmetic) {
  // (a+bi)^2 = a^2 - b^2 + 2abi, written out by hand.
  const double a = 1.5, b = 0.1;
  const double re = (a * a - b * b + 2.0) / 3.0;
  const double im = 2.0 * a * b / 3.0;
  const cplx l = lorentz_factor(cplx(a, b));
  EXPECT_NEAR(l.real(), re, 1e-15);
  EXPECT_NEAR(l.imag(), im, 1e-15);
}

TEST(LorentzFactor, ConjugateSymmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const cplx n(1.0 + u(rng), u(rng));
    const cplx a = lorentz_factor(std::conj(n));
    const cplx b = std::conj(lorentz_factor(n));
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-14);
  }
}

TEST(OnsagerFactor, ValuesAndAsymptote) {
  EXPECT_EQ(onsager_factor(1.0), 1.0);
  EXPECT_NEAR(onsager_factor(2.0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(onsager_factor(1e3), 1.5, 1e-5);
}

TEST(OnsagerFactor, SingularDenominatorThrows) {
  const cplx n(0.0, 1.0 / std::sqrt(2.0));  // 2n^2 + 1 = 0
  EXPECT_THROW(onsager_factor(n), SingularityError);
}

TEST(EnhancementFactors, VacuumAndRealIndexBounds) {
  const auto v = enhancement_factors(1.0);
  EXPECT_EQ(v.lorentz, cplx(1.0));
  EXPECT_EQ(v.onsager, cplx(1.0));
  for (double n = 1.05; n < 10.0; n += 0.37) {
    const auto f = enhancement_factors(n);
    EXPECT_GT(f.lorentz.real(), 1.0);
    EXPECT_GT(f.onsager.real(), 1.0);
    EXPECT_LT(f.onsager.real(), 1.5);
    EXPECT_EQ(f.index, cplx(n));
  }
}

TEST(ClausiusMossotti, KnownValues) {
  EXPECT_EQ(clausius_mossotti(0.0), 1.0);
  EXPECT_EQ(clausius_mossotti(0.25), 2.0);
}

TEST(ClausiusMossotti, CatastropheAtUnity) {
  EXPECT_THROW(clausius_mossotti(1.0), PolarizationCatastrophe);
  EXPECT_THROW(clausius_mossotti(1.5), PolarizationCatastrophe);
  EXPECT_THROW(clausius_mossotti(cplx(1.0, 0.0)), PolarizationCatastrophe);
}

TEST(ClausiusMossotti, RoundTripThroughInverse) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double eps = u(rng);
    EXPECT_NEAR(clausius_mossotti(clausius_mossotti_parameter(eps)), eps, 1e-12 * eps);
  }
}

TEST(ClausiusMossotti, StrictlyIncreasing) {
  double prev = clausius_mossotti(0.0);
  for (double x = 0.001; x < 0.999; x += 0.001) {
    const double e = clausius_mossotti(x);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(PolarizationEnvelope, VacuumWithoutCoherenceIsZero) {
  SystemParams p;
  p.nu = 3.0;
  EXPECT_EQ(polarization_envelope(1.0, 0.0, p), cplx(0.0));
}

TEST(PolarizationEnvelope, NoFieldInVacuumIsBareDipoleTerm) {
  SystemParams p;
  p.nu = 2.5;
  const cplx r(0.1, -0.2);
  EXPECT_NEAR(std::abs(polarization_envelope(0.0, r, p) - 2.0 * p.nu * r), 0.0, 1e-15);
}

TEST(PolarizationEnvelope, DirectSubstitution) {
  // eps = 4, field 1, r21 = 0.1i, nu = 1: (4-1)/3 * 1 + 2 * 2 * 1 * 0.1i.
  SystemParams p;
  p.n = 2.0;
  p.nu = 1.0;
  const cplx got = polarization_envelope(1.0, cplx(0.0, 0.1), p);
  EXPECT_NEAR(got.real(), 1.0, 1e-15);
  EXPECT_NEAR(got.imag(), 0.4, 1e-15);
  EXPECT_NEAR(std::abs(local_field(1.0, cplx(0.0, 0.1), p) - cplx(2.0, 0.4)), 0.0, 1e-15);
}

TEST(LocalField, LorentzEnhancementWithoutCoherence) {
  SystemParams p;
  p.n = 1.7;
  const cplx E(0.3, 0.4);
  EXPECT_NEAR(std::abs(local_field(E, 0.0, p) - lorentz_factor(cplx(1.7)) * E), 0.0, 1e-15);
}

TEST(DecayScalings, VirtualCavity) {
  EXPECT_EQ(decay_virtual_cavity(1.0), 1.0);
  EXPECT_NEAR(decay_virtual_cavity(2.0), 8.0, 1e-14);
  const double n = 50.0;
  const double ratio = decay_virtual_cavity(n) / (std::pow(n, 5) / 9.0);
  EXPECT_GE(ratio, 0.99);
  EXPECT_LE(ratio, 1.01);
}

TEST(DecayScalings, RealCavity) {
  EXPECT_EQ(decay_real_cavity(1.0), 1.0);
  EXPECT_NEAR(decay_real_cavity(2.0), 32.0 / 9.0, 1e-14);
  const double r = decay_real_cavity(100.0) / 100.0;
  EXPECT_GE(r, 2.24);
  EXPECT_LE(r, 2.26);
}

TEST(DecayScalings, RejectSubVacuumIndex) {
  EXPECT_THROW(decay_virtual_cavity(0.9), DomainError);
  EXPECT_THROW(decay_real_cavity(0.5), DomainError);
}

TEST(DecayScalings, VirtualCavityDominatesRealCavity) {
  for (double n = 1.0; n <= 10.0; n += 0.05)
    EXPECT_GE(decay_virtual_cavity(n), decay_real_cavity(n) * (1.0 - 1e-15));
}
