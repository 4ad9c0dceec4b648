#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tmsi/cavity_io.hpp"
#include "tmsi/errors.hpp"

using namespace tmsi;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double crel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

CavityRates reference_rates() { return derive_rates(RingGeometry::reference()); }

}  // namespace

TEST(DriftMatrix, Structure) {
  const CavityRates r(1e9, 4e7);
  const Injection inj = Injection::from_sigma(3e8, r, 0.4);
  const Matrix4c k = drift_matrix(r, inj, {1e7, -2e7, 0});
  EXPECT_LT(std::abs(k(0, 3) - inj.sigma() / 2.0), 1e-6);
  EXPECT_LT(std::abs(k(1, 2) - std::conj(inj.sigma()) / 2.0), 1e-6);
  EXPECT_LT(std::abs(k.trace() - cplx(-2 * r.gamma(), 0)), 1e-6);
}

TEST(DriftMatrix, NoInjectionIsDiagonal) {
  const CavityRates r(1e9, 4e7);
  const Matrix4c k = drift_matrix(r, Injection{}, {3e8, 5e8, 0});
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a != b) EXPECT_EQ(k(a, b), cplx(0, 0));
    }
    EXPECT_EQ(k(a, a).real(), -r.gamma() / 2);
  }
  EXPECT_EQ(k(0, 0).imag(), 3e8);
  EXPECT_EQ(k(1, 1).imag(), -3e8);
}

TEST(OutputTransfer, LosslessPassiveCavityIsUnitary) {
  const CavityRates r(1e9, 0.0);
  for (double d : {0.0, 3e8, -2e9}) {
    const TransferMatrices t = output_transfer(r, Injection{}, {d, -0.5 * d, 0});
    EXPECT_LT((t.s_in * t.s_in.adjoint() - Matrix4c::Identity()).norm(), 1e-12);
    EXPECT_EQ(t.s_gamma.norm(), 0.0);
  }
}

TEST(OutputTransfer, CriticalCouplingExtinction) {
  const CavityRates r(1e9, 1e9);
  const TransferMatrices t = output_transfer(r, Injection{}, {});
  for (int a = 0; a < 4; ++a) EXPECT_LT(std::abs(t.s_in(a, a)), 1e-15);
}

TEST(OutputTransfer, ThresholdIsSingular) {
  const CavityRates r(1e9, 1e8);
  EXPECT_THROW(output_transfer(r, Injection::normalized(1.0, r), {}), ThresholdError);
  try {
    output_transfer(r, Injection::normalized(1.0, r), {});
  } catch (const ThresholdError& e) {
    EXPECT_NE(std::string(e.what()).find("at/above threshold"), std::string::npos);
  }
}

TEST(OutputTransfer, NumericMatchesClosedFormOnGrid) {
  const CavityRates r(1.2e9, 3.8e7);
  const double big = r.total();
  for (int a = 0; a < 10; ++a) {
    const double sn = 0.09 * a + 0.05;
    for (int b = 0; b < 10; ++b) {
      const Detunings det{(b - 4.5) * 0.4 * big, (b % 3 - 1) * 0.7 * big, 0};
      const Injection inj = Injection::normalized(sn, r);
      const OutputMoments num = moments_from_transfer(output_transfer(r, inj, det));
      EXPECT_LT(rel(num.n_s, photon_flux(r, inj, det)), 1e-9) << sn << " " << b;
      EXPECT_LT(rel(num.n_i, photon_flux(r, inj, det)), 1e-9);
      EXPECT_LT(crel(num.m_si, anomalous_moment(r, inj, det)), 1e-9);
    }
  }
}

TEST(OutputTransfer, StaticMomentsMatchNumericOnRandomGrid) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const CavityRates r(1e9 * (1.2 + u(rng)), 2e8 * (1.1 + u(rng)));
    const Injection inj = Injection::from_sigma(r.total() * 0.5 * (1 + u(rng)) * 0.99, r, kPi * u(rng));
    const Detunings det{r.total() * u(rng), r.total() * u(rng), 0};
    const SeedAmplitudes seeds{cplx(u(rng), u(rng)) * 1e4, cplx(u(rng), u(rng)) * 1e4};
    const OutputMoments num = moments_from_transfer(output_transfer(r, inj, det), seeds);
    const auto [bs, bi] = static_moments(r, inj, det, seeds);
    EXPECT_LT(crel(bs, num.first_s), 1e-9);
    EXPECT_LT(crel(bi, num.first_i), 1e-9);
    EXPECT_LT(crel(anomalous_moment(r, inj, det), num.m_si), 1e-9);
  }
}

TEST(PhotonFlux, Examples) {
  const CavityRates r = reference_rates();
  EXPECT_EQ(photon_flux(r, Injection{}), 0.0);
  const double ns = photon_flux(r, Injection::normalized(0.99895, r));
  EXPECT_LT(rel(ns, 8.78e5), 0.01);
  const double omega = pump_omega(RingGeometry::reference());
  const double power_mw = kCodata2018.hbar * omega * ns * 1e3;
  EXPECT_LT(rel(power_mw, 1.13e-10), 0.03);
}

TEST(PhotonFlux, DetunedExpansion) {
  const CavityRates r(1.1e9, 9e7);
  const double big = r.total();
  const double s = 0.7 * big;
  // Δ_i = Δ_s = Γ: Ξ = (4Γ² − σ²)² + 8Γ⁴ + Γ⁴.
  const double xi = std::pow(4 * big * big - s * s, 2) + 9 * std::pow(big, 4);
  const double oracle = 4 * s * s * r.kappa() * big / (xi - 2 * s * s * big * big);
  EXPECT_LT(rel(photon_flux(r, Injection::from_sigma(s, r), {big, big, 0}), oracle), 1e-13);
}

TEST(PhotonFlux, ThresholdGuard) {
  const CavityRates r(1e9, 1e8);
  EXPECT_THROW(photon_flux(r, Injection::normalized(1.0, r)), ThresholdError);
  EXPECT_THROW(photon_flux(r, Injection::normalized(1.3, r)), ThresholdError);
}

TEST(AnomalousMoment, ZeroDetuningForm) {
  const CavityRates r(1e9, 1e8);
  EXPECT_EQ(anomalous_moment(r, Injection{}), cplx(0, 0));
  const double big = r.total();
  for (double sn : {0.1, 0.5, 0.97}) {
    const double s = sn * big;
    const cplx m = anomalous_moment(r, Injection::normalized(sn, r));
    EXPECT_LT(rel(m.real(), 2 * r.kappa() * s * (big * big + s * s) / std::pow(big * big - s * s, 2)), 1e-13);
    EXPECT_EQ(m.imag(), 0.0);
    EXPECT_GT(m.real(), 0.0);
  }
}

TEST(AnomalousMoment, PurityBoundSaturatedWithoutLoss) {
  const CavityRates r(1e9, 0.0);
  for (double sn : {0.05, 0.5, 0.9, 0.999}) {
    const Injection inj = Injection::normalized(sn, r);
    const double n = photon_flux(r, inj);
    EXPECT_LT(rel(std::norm(anomalous_moment(r, inj)), n * (n + 1)), 1e-9);
  }
}

TEST(AnomalousMoment, PhysicalityWithLoss) {
  const CavityRates r = reference_rates();
  for (double sn : {0.05, 0.5, 0.9, 0.999}) {
    const Injection inj = Injection::normalized(sn, r);
    const double n = photon_flux(r, inj);
    EXPECT_LE(std::norm(anomalous_moment(r, inj)), n * (n + 1));
  }
}

TEST(StaticMoments, Reductions) {
  const CavityRates r(1e9, 5e7);
  const Injection inj = Injection::normalized(0.6, r);
  const auto [zs, zi] = static_moments(r, inj, {2e7, 1e7, 0}, {});
  EXPECT_EQ(zs, cplx(0, 0));
  EXPECT_EQ(zi, cplx(0, 0));
  const CavityRates lossless(1e9, 0.0);
  const cplx seed(3.0, -2.0);
  const auto [bs, bi] = static_moments(lossless, Injection{}, {}, {seed, 0.0});
  EXPECT_LT(std::abs(bs - seed), 1e-12);
  EXPECT_EQ(bi, cplx(0, 0));
}

TEST(StaticMoments, ConjugateBranch) {
  // The creation-operator output is the conjugate row of the transfer matrix.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 20; ++n) {
    const CavityRates r(1e9, 1e8 * (1.5 + u(rng)));
    const Injection inj = Injection::normalized(0.5 + 0.4 * u(rng), r);
    const Detunings det{r.total() * u(rng), r.total() * u(rng), 0};
    const SeedAmplitudes seeds{cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
    const TransferMatrices t = output_transfer(r, inj, det);
    Eigen::Matrix<cplx, 4, 1> b;
    b << seeds.alpha_s, std::conj(seeds.alpha_s), seeds.alpha_i, std::conj(seeds.alpha_i);
    const auto out = (t.s_in * b).eval();
    const auto [bs, bi] = static_moments(r, inj, det, seeds);
    EXPECT_LT(std::abs(out(1) - std::conj(bs)), 1e-12);
    EXPECT_LT(std::abs(out(3) - std::conj(bi)), 1e-12);
  }
}

TEST(Jsi, PeakValue) {
  const CavityRates r = reference_rates();
  EXPECT_LT(rel(jsi(r, Injection::normalized(0.995, r), 0, 0), 2.98e9), 0.02);
}

TEST(Jsi, VanishesWithoutInjection) {
  const CavityRates r = reference_rates();
  for (double d : {0.0, 1e8, -3e9}) EXPECT_EQ(jsi(r, Injection{}, d, 0.3 * d), 0.0);
}

TEST(Jsi, AntiCorrelatedRidgeAndSymmetry) {
  const CavityRates r = reference_rates();
  const Injection inj = Injection::normalized(0.9, r);
  const double big = r.total();
  EXPECT_GE(jsi(r, inj, big, -big), jsi(r, inj, big, big));
  for (double a : {-2.0, -0.3, 0.0, 0.8}) {
    for (double b : {-1.1, 0.2, 1.7}) {
      EXPECT_EQ(jsi(r, inj, a * big, b * big), jsi(r, inj, b * big, a * big));
    }
  }
}

TEST(Jsi, EqualsPairCorrelationFromMoments) {
  const CavityRates r(1.2e9, 3.8e7);
  const Injection inj = Injection::normalized(0.8, r);
  for (double a : {-1.0, 0.0, 0.4}) {
    for (double b : {-0.6, 0.0, 1.3}) {
      const Detunings det = Detunings::from_pair_offsets(a * r.total(), b * r.total());
      const double ns = photon_flux(r, inj, det);
      const double oracle = ns * ns + std::norm(anomalous_moment(r, inj, det));
      EXPECT_LT(rel(jsi(r, inj, a * r.total(), b * r.total()), oracle), 1e-10);
    }
  }
}

TEST(QuadratureVariance, Vacuum) {
  const CavityRates r = reference_rates();
  for (double phi : {0.0, 0.3, kPi / 2, 2.0}) EXPECT_NEAR(quadrature_variance(r, Injection{}, phi), 1.0, 1e-15);
}

TEST(QuadratureVariance, ReferenceDecibels) {
  const CavityRates r = reference_rates();
  const Injection a = Injection::normalized(0.95, r);
  EXPECT_NEAR(to_db(quadrature_variance(r, a, kPi / 2)), -15.0, 0.2);
  EXPECT_NEAR(to_db(quadrature_variance(r, a, 0)), 31.68, 0.2);
  const Injection b = Injection::normalized(0.99895, r);
  EXPECT_NEAR(to_db(quadrature_variance(r, b, 0)), 65.46, 0.1);
}

TEST(QuadratureVariance, MatchesMomentDefinition) {
  const CavityRates r(1.2e9, 3.8e7);
  for (double sn : {0.1, 0.5, 0.9}) {
    for (double phs : {0.0, 0.9}) {
      const Injection inj = Injection::from_sigma(sn * r.total(), r, phs);
      const double n = photon_flux(r, inj);
      const cplx m = anomalous_moment(r, inj);
      for (int k = 0; k < 16; ++k) {
        const double phi = k * kPi / 8;
        const double oracle = 1 + 2 * n + 2 * std::real(m * std::polar(1.0, 2 * phi));
        EXPECT_LT(rel(quadrature_variance(r, inj, phi), oracle), 1e-9);
      }
    }
  }
}

TEST(VarianceExtrema, BitIdenticalToGeneralOperation) {
  const CavityRates r = reference_rates();
  for (double sn : {0.0, 0.2, 0.95, 0.99895}) {
    const Injection inj = Injection::normalized(sn, r);
    const VarianceExtrema v = variance_extrema(r, inj);
    EXPECT_EQ(v.squeezed, quadrature_variance(r, inj, kPi / 2));
    EXPECT_EQ(v.anti_squeezed, quadrature_variance(r, inj, 0.0));
  }
}

TEST(VarianceExtrema, Limits) {
  const CavityRates ideal(1e9, 0.0);
  const VarianceExtrema v = variance_extrema(ideal, Injection::normalized(1 - 1e-9, ideal));
  EXPECT_LT(v.squeezed, 1e-9);
  EXPECT_GT(v.anti_squeezed, 1e9);
  const CavityRates critical(1e9, 1e9);
  EXPECT_NEAR(variance_extrema(critical, Injection::normalized(1 - 1e-12, critical)).squeezed, 0.5, 1e-9);
}

TEST(VarianceExtrema, UnderCouplingStaysAboveMinusThreeDb) {
  RingGeometry g = RingGeometry::reference();
  g.alpha_loss = 23.04;
  const CavityRates r = derive_rates(g);
  ASSERT_LT(r.kappa(), r.gamma());
  double previous = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double vsq = variance_extrema(r, Injection::normalized(k / 100.0, r)).squeezed;
    EXPECT_GT(to_db(vsq), -3.0);
    EXPECT_LT(vsq, previous);
    previous = vsq;
  }
}

TEST(VarianceExtrema, UncertaintyProductAndMonotonicity) {
  const CavityRates lossy = reference_rates();
  const CavityRates lossless(lossy.kappa(), 0.0);
  VarianceExtrema prev = variance_extrema(lossy, Injection{});
  for (int k = 1; k <= 999; ++k) {
    const double sn = k / 1000.0;
    const VarianceExtrema v = variance_extrema(lossy, Injection::normalized(sn, lossy));
    EXPECT_GT(v.squeezed * v.anti_squeezed, 1.0);
    EXPECT_LT(v.squeezed, prev.squeezed);
    EXPECT_GT(v.anti_squeezed, prev.anti_squeezed);
    prev = v;
    const VarianceExtrema w = variance_extrema(lossless, Injection::normalized(sn, lossless));
    EXPECT_NEAR(w.squeezed * w.anti_squeezed, 1.0, 1e-9);
  }
}

TEST(VarianceExtrema, ThresholdGuard) {
  const CavityRates r = reference_rates();
  EXPECT_THROW(variance_extrema(r, Injection::normalized(1.0, r)), ThresholdError);
  EXPECT_THROW(quadrature_variance(r, Injection::normalized(1.01, r), 0.0), ThresholdError);
}

TEST(SqueezingParameter, Examples) {
  const CavityRates r = reference_rates();
  EXPECT_EQ(squeezing_parameter(r, Injection{}), 0.0);
  EXPECT_NEAR(squeezing_parameter(r, Injection::normalized(0.99895, r)), 7.54, 0.02);
  // Find σ with n_s = sinh²(1) by bisection, then check r = 1.
  const double target = std::pow(std::sinh(1.0), 2);
  double lo = 0.0, hi = 0.9;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (photon_flux(r, Injection::normalized(mid, r)) < target ? lo : hi) = mid;
  }
  EXPECT_NEAR(squeezing_parameter(r, Injection::normalized(lo, r)), 1.0, 1e-9);
}

TEST(Moments, VacuumLimitAndPairSymmetry) {
  const CavityRates r = reference_rates();
  const Injection tiny = Injection::normalized(1e-9, r);
  const OutputMoments out = output_moments(r, tiny);
  EXPECT_LT(out.n_s, 1e-15);
  EXPECT_LT(std::abs(out.m_si), 1e-8);
  EXPECT_NEAR(intracavity_number(r, tiny), 0.0, 1e-17);
  for (double d : {-2e9, 0.0, 5e8}) {
    const OutputMoments o = output_moments(r, Injection::normalized(0.7, r), {d, 0.3 * d, 0});
    EXPECT_EQ(o.n_s, o.n_i);
  }
}

TEST(IntracavityNumber, ClosedForm) {
  const CavityRates r(1e9, 1e8);
  const double s = 0.6;
  EXPECT_LT(rel(intracavity_number(r, Injection::normalized(s, r)), s * s / (2 * (1 - s * s))), 1e-14);
}

TEST(Homodyne, VacuumAndZeroLo) {
  const OutputMoments vac;
  const HomodyneReading h = homodyne_signal(vac, 1e3, 0.4);
  EXPECT_EQ(h.mean, 0.0);
  EXPECT_NEAR(h.variance, 2e6, 1e-9);
  const HomodyneReading z = homodyne_signal(output_moments(CavityRates(1e9, 0), Injection{}, {}, {1.0, 2.0}), 0.0, 0.0);
  EXPECT_EQ(z.mean, 0.0);
  EXPECT_EQ(z.variance, 0.0);
}

TEST(Homodyne, VarianceRatioEqualsQuadratureVariance) {
  const CavityRates r = reference_rates();
  const Injection inj = Injection::normalized(0.8, r);
  const OutputMoments out = output_moments(r, inj);
  const double vacuum = homodyne_signal(OutputMoments{}, 50.0, 0.0).variance;
  for (int k = 0; k < 24; ++k) {
    const double phi = k * kPi / 12;
    EXPECT_LT(rel(homodyne_signal(out, 50.0, phi).variance / vacuum, quadrature_variance(r, inj, phi)), 1e-9);
  }
}

TEST(Homodyne, SeededMean) {
  const CavityRates r(1e9, 0.0);
  const OutputMoments out = output_moments(r, Injection{}, {}, {cplx(2.0, 0.0), cplx(0.0, 0.0)});
  // All-pass: ⟨b_s⟩ = α_s, so the mean is 2|α_LO|·Re(α_s e^{iφ}).
  EXPECT_NEAR(homodyne_signal(out, 3.0, 0.0).mean, 12.0, 1e-12);
  EXPECT_NEAR(homodyne_signal(out, 3.0, kPi / 2).mean, 0.0, 1e-12);
}
