#include "tmsi/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tmsi/errors.hpp"

namespace tmsi {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw DomainError(std::string("RingGeometry.") + field + " must satisfy " + rule);
}

}  // namespace

RingGeometry RingGeometry::reference() {
  RingGeometry g;
  g.ring_length = 2.0 * std::numbers::pi * 220e-6;
  g.n_eff = 1.801;
  g.n_g = 2.10087;
  g.cross_coupling = 0.01;
  g.alpha_loss = 0.23;
  g.n2 = 2.4e-19;
  g.a_eff = 1.05564e-12;
  g.lambda_p = 1550e-9;
  return g;
}

void RingGeometry::validate() const {
  require(ring_length > 0.0, "ring_length", "L > 0");
  require(cross_coupling >= 0.0 && cross_coupling <= 1.0, "cross_coupling", "0 <= X <= 1");
  require(alpha_loss >= 0.0, "alpha_loss", "alpha_loss >= 0");
  require(n_eff >= 1.0, "n_eff", "n_eff >= 1");
  require(n_g >= 1.0, "n_g", "n_g >= 1");
  require(a_eff > 0.0, "a_eff", "A_eff > 0");
  require(lambda_p > 0.0, "lambda_p", "lambda_p > 0");
  require(n2 >= 0.0, "n2", "n2 >= 0");
}

CavityRates::CavityRates(double kappa, double gamma, double t_round, double t_trans)
    : kappa_(kappa), gamma_(gamma), total_(kappa + gamma), t_round_(t_round), t_trans_(t_trans) {
  if (!(kappa >= 0.0) || !(gamma >= 0.0)) throw DomainError("CavityRates: kappa and gamma must be >= 0");
}

PumpSpec PumpSpec::from_power(double power, double omega, double phase, const PhysicalConstants& k) {
  return PumpSpec{power, phase, omega, pump_amplitude(power, omega, phase, k)};
}

Injection Injection::normalized(double sigma_n, const CavityRates& rates) {
  return from_sigma(sigma_n * rates.total(), rates);
}

Injection Injection::from_sigma(double sigma_mag, const CavityRates& rates, double phi_sigma) {
  if (!(sigma_mag >= 0.0)) throw DomainError("injection magnitude must be >= 0");
  Injection inj;
  inj.sigma_mag = sigma_mag;
  inj.phi_sigma = phi_sigma;
  inj.sigma_th = rates.total();
  inj.sigma_n = inj.sigma_th > 0.0 ? sigma_mag / inj.sigma_th : 0.0;
  return inj;
}

double pump_omega(const RingGeometry& geom, const PhysicalConstants& k) {
  return 2.0 * std::numbers::pi * k.c / geom.lambda_p;
}

CavityRates derive_rates(const RingGeometry& geom, const PhysicalConstants& k) {
  if (geom.ring_length == 0.0) throw DomainError("derive_rates: ring length is zero");
  geom.validate();
  const double t_round = geom.n_eff * geom.ring_length / k.c;
  const double per_round = 1.0 / t_round;
  const double kappa = geom.cross_coupling * per_round;
  // -expm1 keeps γ accurate when α·L ~ 1e-4.
  const double gamma = -std::expm1(-geom.alpha_loss * geom.ring_length) * per_round;
  const double t_trans = (1.0 - geom.cross_coupling) * per_round;
  return CavityRates(kappa, gamma, t_round, t_trans);
}

double efficiency(double alpha_loss, double length) { return std::exp(-alpha_loss * length); }

FwmStrength fwm_gain(const RingGeometry& geom, const PhysicalConstants& k,
                     std::optional<double> omega_s, std::optional<double> omega_i) {
  if (geom.a_eff == 0.0) throw DomainError("fwm_gain: effective area is zero");
  if (geom.ring_length == 0.0) throw DomainError("fwm_gain: ring length is zero");
  geom.validate();
  const double wp = pump_omega(geom, k);
  const double ws = omega_s.value_or(wp);
  const double wi = omega_i.value_or(wp);
  FwmStrength out;
  out.v_g = k.c / geom.n_g;
  out.gamma_nl = wp * geom.n2 / (k.c * geom.a_eff);
  const double w_mean = std::pow(wp * wp * ws * wi, 0.25);
  out.g = k.hbar * w_mean * out.v_g * out.v_g * out.gamma_nl / geom.ring_length;
  return out;
}

double n2_from_chi3(double chi3, double n_eff, const PhysicalConstants& k) {
  return 3.0 * chi3 / (4.0 * k.eps0 * k.c * n_eff * n_eff);
}

double chi3_from_n2(double n2, double n_eff, const PhysicalConstants& k) {
  return 4.0 * k.eps0 * k.c * n_eff * n_eff * n2 / 3.0;
}

cplx pump_amplitude(double power, double omega, double phase, const PhysicalConstants& k) {
  if (!(omega > 0.0)) throw DomainError("pump_amplitude: omega must be > 0");
  if (!(power >= 0.0)) throw DomainError("pump_amplitude: power must be >= 0");
  return std::polar(std::sqrt(power / (k.hbar * omega)), phase);
}

cplx intracavity_pump(cplx alpha_l, const CavityRates& rates, double delta_p) {
  const cplx denom(rates.total() / 2.0, -delta_p);
  if (denom == cplx(0.0, 0.0)) throw DomainError("intracavity_pump: degenerate cavity (Gamma = 0, Delta_p = 0)");
  return std::sqrt(rates.kappa()) * alpha_l / denom;
}

Injection injection_from_pump(double g, cplx alpha_p, const CavityRates& rates) {
  const cplx sigma = 2.0 * g * alpha_p * alpha_p;
  return Injection::from_sigma(std::abs(sigma), rates, 2.0 * std::arg(alpha_p));
}

namespace {

void check_threshold_inputs(const CavityRates& rates, double g, double omega_p) {
  if (!(g > 0.0)) throw DomainError("no FWM threshold: g must be > 0");
  if (!(rates.kappa() > 0.0)) throw DomainError("no FWM threshold: kappa must be > 0");
  if (!(omega_p > 0.0)) throw DomainError("pump angular frequency must be > 0");
}

}  // namespace

double threshold_power(const CavityRates& rates, double g, double omega_p, double delta_p,
                       const PhysicalConstants& k) {
  check_threshold_inputs(rates, g, omega_p);
  const cplx lorentz(rates.total() / 2.0, -delta_p);
  return rates.total() * k.hbar * omega_p * std::abs(lorentz * lorentz) / (2.0 * g * rates.kappa());
}

Injection sigma_from_power(double power, const CavityRates& rates, double g, double omega_p,
                           double delta_p, const PhysicalConstants& k) {
  check_threshold_inputs(rates, g, omega_p);
  if (!(power >= 0.0)) throw DomainError("sigma_from_power: power must be >= 0");
  const cplx lorentz(rates.total() / 2.0, -delta_p);
  const cplx sigma = 2.0 * g * rates.kappa() / (lorentz * lorentz) * (power / (k.hbar * omega_p));
  return Injection::from_sigma(std::abs(sigma), rates, power > 0.0 ? std::arg(sigma) : 0.0);
}

double resonance_frequency(const RingGeometry& geom, int mode_index, const PhysicalConstants& k) {
  if (mode_index < 1) throw DomainError("resonance_frequency: mode index must be >= 1");
  return 2.0 * std::numbers::pi * mode_index * k.c / (geom.n_eff * geom.ring_length);
}

int nearest_mode_index(const RingGeometry& geom, const PhysicalConstants& /*k*/) {
  const double m = geom.n_eff * geom.ring_length / geom.lambda_p;
  return std::max(1, static_cast<int>(std::lround(m)));
}

}  // namespace tmsi
