#pragma once

// Device parameters of the microring squeezer and the rates derived from them.
//
// Units are SI throughout. Rates (κ, γ, Γ, g, σ) are in Hz, angular
// frequencies in rad/s, and propagating amplitudes in √Hz (photon flux).

#include <complex>
#include <optional>

namespace tmsi {

using cplx = std::complex<double>;

/// CODATA 2018 values.
struct PhysicalConstants {
  double c = 299792458.0;
  double hbar = 1.054571817e-34;
  double eps0 = 8.8541878128e-12;
};

inline constexpr PhysicalConstants kCodata2018{};

struct RingGeometry {
  double ring_length = 0.0;     ///< m
  double n_eff = 1.0;
  double n_g = 1.0;
  double cross_coupling = 0.0;  ///< X, fraction coupled out per round trip
  double alpha_loss = 0.0;      ///< 1/m
  double n2 = 0.0;              ///< m²/W
  double a_eff = 0.0;           ///< m²
  double lambda_p = 0.0;        ///< m

  /// Silicon-nitride ring used throughout the reference design: 220 µm bend
  /// radius, X = 0.01, 1 dB/m propagation loss, pumped at 1550 nm.
  static RingGeometry reference();

  /// Throws DomainError naming the first violated field.
  void validate() const;
};

/// Coupling/loss rates of the cavity. Γ is always computed as κ + γ.
class CavityRates {
 public:
  CavityRates(double kappa, double gamma, double t_round = 0.0, double t_trans = 0.0);

  double kappa() const { return kappa_; }
  double gamma() const { return gamma_; }
  double total() const { return total_; }
  double t_round() const { return t_round_; }
  double t_trans() const { return t_trans_; }
  double decay_ratio() const { return kappa_ / gamma_; }

 private:
  double kappa_;
  double gamma_;
  double total_;
  double t_round_;
  double t_trans_;
};

struct PumpSpec {
  double power = 0.0;  ///< W
  double phase = 0.0;  ///< rad
  double omega = 0.0;  ///< rad/s
  cplx amplitude;      ///< √Hz

  static PumpSpec from_power(double power, double omega, double phase = 0.0,
                             const PhysicalConstants& k = kCodata2018);
};

struct FwmStrength {
  double g = 0.0;         ///< Hz
  double gamma_nl = 0.0;  ///< 1/(W·m)
  double v_g = 0.0;       ///< m/s
};

struct Injection {
  double sigma_mag = 0.0;    ///< |σ|, Hz
  double phi_sigma = 0.0;    ///< rad
  double delta_sigma = 0.0;  ///< FWM detuning, rad/s (carried, not used by the steady-state model)
  double sigma_th = 0.0;     ///< Γ
  double sigma_n = 0.0;      ///< |σ|/σ_th

  /// Injection at a given fraction of threshold, real σ.
  static Injection normalized(double sigma_n, const CavityRates& rates);
  /// Injection with |σ| in Hz and optional phase.
  static Injection from_sigma(double sigma_mag, const CavityRates& rates, double phi_sigma = 0.0);

  cplx sigma() const { return std::polar(sigma_mag, phi_sigma); }
};

double pump_omega(const RingGeometry& geom, const PhysicalConstants& k = kCodata2018);

CavityRates derive_rates(const RingGeometry& geom, const PhysicalConstants& k = kCodata2018);

/// Power transmission e^{−α·L} of a waveguide section.
double efficiency(double alpha_loss, double length);

/// FWM gain. By default uses the degenerate approximation ω_s ≈ ω_i ≈ ω_p;
/// pass signal/idler angular frequencies to evaluate (ω_p²ω_sω_i)^{1/4} exactly.
FwmStrength fwm_gain(const RingGeometry& geom, const PhysicalConstants& k = kCodata2018,
                     std::optional<double> omega_s = std::nullopt,
                     std::optional<double> omega_i = std::nullopt);

double n2_from_chi3(double chi3, double n_eff, const PhysicalConstants& k = kCodata2018);
double chi3_from_n2(double n2, double n_eff, const PhysicalConstants& k = kCodata2018);

/// √(P/ħω)·e^{iφ}
cplx pump_amplitude(double power, double omega, double phase = 0.0,
                    const PhysicalConstants& k = kCodata2018);

/// Steady-state intracavity pump amplitude √κ·α_l/(Γ/2 − iΔ_p) (dimensionless).
cplx intracavity_pump(cplx alpha_l, const CavityRates& rates, double delta_p = 0.0);

/// σ = 2g·α_p²
Injection injection_from_pump(double g, cplx alpha_p, const CavityRates& rates);

/// Waveguide pump power at which |σ| = Γ.
double threshold_power(const CavityRates& rates, double g, double omega_p, double delta_p = 0.0,
                       const PhysicalConstants& k = kCodata2018);

Injection sigma_from_power(double power, const CavityRates& rates, double g, double omega_p,
                           double delta_p = 0.0, const PhysicalConstants& k = kCodata2018);

/// ω_r = 2πmc/(n_eff·L)
double resonance_frequency(const RingGeometry& geom, int mode_index,
                           const PhysicalConstants& k = kCodata2018);

/// Mode index whose resonance lies closest to the pump wavelength.
int nearest_mode_index(const RingGeometry& geom, const PhysicalConstants& k = kCodata2018);

}  // namespace tmsi
