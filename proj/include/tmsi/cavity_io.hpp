#pragma once

// Linearized input-output model of the below-threshold FWM cavity.
//
// Operator ordering in all 4-vectors is (a_s, a_s†, a_i, a_i†). Quantities that
// carry δ(ω−ω′) in the continuum are returned as their prefactor; at zero
// detuning that prefactor is the photon flux in Hz.

#include <Eigen/Dense>

#include "tmsi/params.hpp"

namespace tmsi {

using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

/// Detunings of the evaluation frequency from the signal/idler/pump
/// resonances. Joint-spectrum axes use Δ_s = Δω_s and Δ_i = −Δω_i.
struct Detunings {
  double delta_s = 0.0;
  double delta_i = 0.0;
  double delta_p = 0.0;

  static Detunings from_pair_offsets(double delta_ws, double delta_wi) {
    return Detunings{delta_ws, -delta_wi, 0.0};
  }
};

struct TransferMatrices {
  Matrix4c s_in;     ///< waveguide input → output
  Matrix4c s_gamma;  ///< loss bath → output
};

struct SeedAmplitudes {
  cplx alpha_s;
  cplx alpha_i;
};

struct OutputMoments {
  double n_s = 0.0;
  double n_i = 0.0;
  cplx m_si;      ///< ⟨b_i b_s⟩
  cplx first_s;   ///< static ⟨b_s⟩ from coherent seeds
  cplx first_i;
};

struct VarianceExtrema {
  double squeezed = 1.0;       ///< V(φ_LO = π/2)
  double anti_squeezed = 1.0;  ///< V(φ_LO = 0)
};

struct HomodyneReading {
  double mean = 0.0;
  double variance = 0.0;
};

/// Drift matrix K in the frame rotating at the evaluation frequency, i.e.
/// with ω_s → −Δ_s and ω_i → −Δ_i, so that Ω − K of the frequency-domain
/// equations equals −drift_matrix(...).
Matrix4c drift_matrix(const CavityRates& rates, const Injection& inj, const Detunings& det);

/// Numeric scattering matrices B_out = S_in·B_in + S_γ·B_γ. Throws
/// ThresholdError when the cavity propagator is singular or ill-conditioned
/// (condition number above 1e12).
TransferMatrices output_transfer(const CavityRates& rates, const Injection& inj, const Detunings& det);

/// Vacuum-input output moments from the numeric transfer route.
OutputMoments moments_from_transfer(const TransferMatrices& t, const SeedAmplitudes& seeds = {});

/// Output signal photon-flux density 4σ²κΓ/(Ξ − 2σ²Γ²).
double photon_flux(const CavityRates& rates, const Injection& inj, const Detunings& det = {});

/// ⟨b_i b_s⟩ of the fluctuating output.
cplx anomalous_moment(const CavityRates& rates, const Injection& inj, const Detunings& det = {});

/// Static output amplitudes (⟨b_s,st⟩, ⟨b_i,st⟩) produced by coherent seeds.
std::pair<cplx, cplx> static_moments(const CavityRates& rates, const Injection& inj,
                                     const Detunings& det, const SeedAmplitudes& seeds);

/// Closed-form output moments (fluctuating plus static).
OutputMoments output_moments(const CavityRates& rates, const Injection& inj,
                             const Detunings& det = {}, const SeedAmplitudes& seeds = {});

/// Frequency-integrated intracavity ⟨a_s†a_s⟩ = σ²/(2(Γ² − σ²)).
double intracavity_number(const CavityRates& rates, const Injection& inj);

/// Joint spectral intensity at signal/idler offsets Δω_s, Δω_i.
double jsi(const CavityRates& rates, const Injection& inj, double delta_ws, double delta_wi);

/// Zero-detuning quadrature variance, vacuum = 1.
double quadrature_variance(const CavityRates& rates, const Injection& inj, double phi_lo);

VarianceExtrema variance_extrema(const CavityRates& rates, const Injection& inj);

/// r = asinh(√n_s)
double squeezing_parameter(const CavityRates& rates, const Injection& inj, const Detunings& det = {});

/// Static (slow) term of balanced homodyne detection with a local oscillator
/// of amplitude |α_LO| at both the signal and idler frequencies.
HomodyneReading homodyne_signal(const OutputMoments& out, double lo_amplitude, double phi_lo);

inline double to_db(double v) { return 10.0 * std::log10(v); }

}  // namespace tmsi
