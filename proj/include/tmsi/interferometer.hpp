#pragma once

// Lossy Mach-Zehnder sensor fed by a coherent beam in port 0 and the
// signal+idler pair in port 1, read out by intensity-difference detection.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tmsi/cavity_io.hpp"
#include "tmsi/params.hpp"

namespace tmsi {

using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

struct SensorSpec {
  double phi = 0.0;
  double eta = 1.0;
  cplx alpha_c;                 ///< coherent amplitude at port 0, √Hz
  double pump_power = 0.0;      ///< W charged to the shot-noise budget
  double pump_omega = 0.0;      ///< rad/s, needed only when pump_power > 0
  double squeeze_phase = 0.0;   ///< extra phase on ⟨a₁a₁⟩; 0 aligns squeezing with φ = π/2
  std::optional<double> sensor_length;

  /// Sets η = e^{−α·L} for a sensor arm of the given length.
  SensorSpec with_length(double length, double alpha_loss) const;
  double pump_flux() const;
  void validate() const;
};

/// Two spatial modes in Gaussian moment form. All second moments refer to the
/// fluctuations around `mean`:
///   number(j,k)     = ⟨δa_j† δa_k⟩
///   anomalous(j,k)  = ⟨δa_j δa_k⟩
///   commutator(j,k) = [a_j, a_k†]
struct GaussianPortState {
  Vector2c mean = Vector2c::Zero();
  Matrix2c number = Matrix2c::Zero();
  Matrix2c anomalous = Matrix2c::Zero();
  Matrix2c commutator = Matrix2c::Identity();

  static GaussianPortState vacuum();
  /// Coherent beam in port 0; port 1 carries the composite b_s + b_i of the
  /// given output pair (⟨a₁†a₁⟩ = 2n_s, ⟨a₁a₁⟩ = 2m_si, [a₁, a₁†] = 2), or
  /// vacuum when no pair is given.
  static GaussianPortState sensor_input(cplx alpha_c, const std::optional<OutputMoments>& pair,
                                        double squeeze_phase = 0.0);

  double photons(int port) const { return std::norm(mean(port)) + number(port, port).real(); }
  /// |⟨aa⟩|² ≤ n(n + c) in every port, c being the port's commutator.
  bool physical(double rel_tol = 1e-12) const;
};

Matrix2c beam_splitter();
Matrix2c phase_shifter(double phi);

/// d = BS·[√η·PS(φ)·BS·a + √(1−η)·b_vac]
GaussianPortState mzi_transform(const GaussianPortState& in, const SensorSpec& spec);

struct IntensityDifference {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact Gaussian statistics of d₀†d₀ − d₁†d₁.
IntensityDifference intensity_difference_stats(const GaussianPortState& out);

struct SensitivityReport {
  double dphi = 0.0;
  double mean_id = 0.0;
  double var_id = 0.0;
  double slope = 0.0;        ///< ∂⟨ID⟩/∂φ
  double snl = 0.0;
  double improvement = 0.0;  ///< Δφ_c / Δφ
};

inline constexpr double kPhaseStep = 1e-6;

SensitivityReport phase_sensitivity_numeric(const SensorSpec& spec, const std::optional<OutputMoments>& pair,
                                            double step = kPhaseStep);

double phase_sensitivity_coherent(const SensorSpec& spec);

/// Closed form at φ = π/2 for the zero-detuning pair of the given cavity.
double phase_sensitivity_squeezed(const SensorSpec& spec, const CavityRates& rates, const Injection& inj);

/// 1/√(⟨d₀†d₀⟩ + ⟨d₁†d₁⟩ + |α_l|²)
double shot_noise_limit(const SensorSpec& spec, const GaussianPortState& out);

struct Improvement {
  double factor = 0.0;
  double decay_ratio = 0.0;
};

Improvement improvement_factor(const SensorSpec& spec, const CavityRates& rates, const Injection& inj);

double critical_length(double alpha_loss);

/// α_c at which the coherent and pair photon fluxes balance, √(2n_s).
double pole_coherent_amplitude(const CavityRates& rates, const Injection& inj);

struct PhaseScanPoint {
  double phi = 0.0;
  double dphi = 0.0;  ///< +inf at a pole
  bool pole = false;
};

std::vector<PhaseScanPoint> sensitivity_vs_phase(const SensorSpec& spec, const std::optional<OutputMoments>& pair,
                                                 const std::vector<double>& phis);

/// Short-sensor improvement for a cavity of decay ratio κ/γ at fixed κ,
/// lossless arms and common α_c.
double short_length_improvement(double decay_ratio, double kappa, double sigma_n, double alpha_c);

/// Empirical logarithmic trend of the short-sensor improvement with decay ratio.
double improvement_trend(double decay_ratio);

}  // namespace tmsi
