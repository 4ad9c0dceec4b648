#include "tmsi/interferometer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tmsi/cumulant.hpp"
#include "tmsi/errors.hpp"

namespace tmsi {

namespace {

struct Ladder {
  int port;
  bool dagger;
};

// Ordered cumulants of a Gaussian two-port state; everything above second
// order vanishes.
cplx gaussian_cumulant(const GaussianPortState& s, const std::vector<Ladder>& ops, const cumulant::Block& block) {
  if (block.size() == 1) {
    const Ladder& x = ops[block[0]];
    return x.dagger ? std::conj(s.mean(x.port)) : s.mean(x.port);
  }
  if (block.size() == 2) {
    const Ladder& x = ops[block[0]];
    const Ladder& y = ops[block[1]];
    if (!x.dagger && !y.dagger) return s.anomalous(x.port, y.port);
    if (x.dagger && y.dagger) return std::conj(s.anomalous(x.port, y.port));
    if (x.dagger) return s.number(x.port, y.port);
    return s.number(y.port, x.port) + s.commutator(x.port, y.port);
  }
  return 0.0;
}

double number_covariance(const GaussianPortState& s, int k, int l) {
  const std::vector<Ladder> ops{{k, true}, {k, false}, {l, true}, {l, false}};
  const auto cum = [&](const cumulant::Block& b) { return gaussian_cumulant(s, ops, b); };
  return cumulant::connected_sum(4, 2, cum).real();
}

double mean_difference(const SensorSpec& spec, const GaussianPortState& in, double phi) {
  SensorSpec shifted = spec;
  shifted.phi = phi;
  const GaussianPortState out = mzi_transform(in, shifted);
  return out.photons(0) - out.photons(1);
}

}  // namespace

SensorSpec SensorSpec::with_length(double length, double alpha_loss) const {
  if (!(length >= 0.0)) throw DomainError("sensor length must be >= 0");
  if (!(alpha_loss >= 0.0)) throw DomainError("alpha_loss must be >= 0");
  SensorSpec s = *this;
  s.sensor_length = length;
  s.eta = efficiency(alpha_loss, length);
  return s;
}

double SensorSpec::pump_flux() const {
  if (pump_power == 0.0) return 0.0;
  return std::norm(pump_amplitude(pump_power, pump_omega));
}

void SensorSpec::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("sensor: eta must lie in (0, 1]");
  if (!(pump_power >= 0.0)) throw DomainError("sensor: pump_power must be >= 0");
  if (pump_power > 0.0 && !(pump_omega > 0.0)) throw DomainError("sensor: pump_omega must be > 0");
}

GaussianPortState GaussianPortState::vacuum() { return GaussianPortState{}; }

GaussianPortState GaussianPortState::sensor_input(cplx alpha_c, const std::optional<OutputMoments>& pair,
                                                  double squeeze_phase) {
  GaussianPortState s;
  s.mean(0) = alpha_c;
  if (pair) {
    s.mean(1) = pair->first_s + pair->first_i;
    s.number(1, 1) = pair->n_s + pair->n_i;
    s.anomalous(1, 1) = 2.0 * pair->m_si * std::polar(1.0, squeeze_phase);
    s.commutator(1, 1) = 2.0;
  }
  return s;
}

bool GaussianPortState::physical(double rel_tol) const {
  for (int k = 0; k < 2; ++k) {
    const double n = number(k, k).real();
    const double c = commutator(k, k).real();
    if (n < 0.0) return false;
    if (std::norm(anomalous(k, k)) > n * (n + c) * (1.0 + rel_tol) + rel_tol) return false;
  }
  return true;
}

Matrix2c beam_splitter() {
  Matrix2c bs;
  bs << 1.0, 1.0, 1.0, -1.0;
  return bs / std::numbers::sqrt2;
}

Matrix2c phase_shifter(double phi) {
  Matrix2c ps = Matrix2c::Zero();
  ps(0, 0) = std::polar(1.0, phi / 2.0);
  ps(1, 1) = std::polar(1.0, -phi / 2.0);
  return ps;
}

GaussianPortState mzi_transform(const GaussianPortState& in, const SensorSpec& spec) {
  spec.validate();
  const Matrix2c bs = beam_splitter();
  const Matrix2c t = std::sqrt(spec.eta) * bs * phase_shifter(spec.phi) * bs;
  GaussianPortState out;
  out.mean = t * in.mean;
  out.number = t.conjugate() * in.number * t.transpose();
  out.anomalous = t * in.anomalous * t.transpose();
  // The loss ports add vacuum through BS·√(1−η), and BS·BS† = 1.
  out.commutator = t * in.commutator * t.adjoint() + (1.0 - spec.eta) * Matrix2c::Identity();
  return out;
}

IntensityDifference intensity_difference_stats(const GaussianPortState& out) {
  IntensityDifference id;
  id.mean = out.photons(0) - out.photons(1);
  const double sign[2] = {1.0, -1.0};
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) id.variance += sign[k] * sign[l] * number_covariance(out, k, l);
  }
  return id;
}

SensitivityReport phase_sensitivity_numeric(const SensorSpec& spec, const std::optional<OutputMoments>& pair,
                                            double step) {
  if (!(step > 0.0)) throw DomainError("phase step must be > 0");
  const GaussianPortState in = GaussianPortState::sensor_input(spec.alpha_c, pair, spec.squeeze_phase);
  const GaussianPortState out = mzi_transform(in, spec);
  const IntensityDifference id = intensity_difference_stats(out);

  SensitivityReport r;
  r.mean_id = id.mean;
  r.var_id = id.variance;
  r.slope = (mean_difference(spec, in, spec.phi + step) - mean_difference(spec, in, spec.phi - step)) / (2.0 * step);
  // Away from exact zeros the slope is O(η·flux); at φ ∈ {0, π} the
  // difference quotient only carries rounding noise.
  const double flux = std::norm(in.mean(0)) + in.photons(1);
  if (std::abs(r.slope) < 1e-30 || std::abs(r.slope) <= 1e-9 * spec.eta * flux) {
    throw PoleError("phase_sensitivity: vanishing signal slope at phi = " + std::to_string(spec.phi));
  }
  r.dphi = std::sqrt(id.variance) / std::abs(r.slope);
  r.snl = shot_noise_limit(spec, out);
  r.improvement = std::abs(spec.alpha_c) > 0.0 ? phase_sensitivity_coherent(spec) / r.dphi : 0.0;
  return r;
}

double phase_sensitivity_coherent(const SensorSpec& spec) {
  spec.validate();
  const double alpha = std::abs(spec.alpha_c);
  if (alpha == 0.0) throw DomainError("coherent sensitivity needs alpha_c != 0");
  return 1.0 / (std::sqrt(spec.eta) * alpha);
}

double phase_sensitivity_squeezed(const SensorSpec& spec, const CavityRates& rates, const Injection& inj) {
  spec.validate();
  if (!(inj.sigma_mag < rates.total())) throw ThresholdError("phase_sensitivity_squeezed");
  const double a2 = std::norm(spec.alpha_c);
  const double eta = spec.eta;
  const double kappa = rates.kappa();
  const double gamma = rates.gamma();
  const double big = rates.total();
  const double s = inj.sigma_mag;
  const double gap = (big - s) * (big + s);
  const double pair_flux = 8.0 * s * s * kappa * big / (gap * gap);
  const double mismatch = std::abs(a2 - pair_flux);
  if (mismatch <= 1e-12 * std::max(a2, pair_flux)) {
    throw PoleError("phase_sensitivity_squeezed: coherent flux equals pair flux");
  }
  const double numerator = eta * a2 * (big - s) * (big - s) * (big * big + s * (2.0 * gamma - 6.0 * kappa) + s * s) +
                           a2 * gap * gap + 8.0 * kappa * s * s * big;
  return std::sqrt(numerator) / (std::sqrt(eta) * gap * mismatch);
}

double shot_noise_limit(const SensorSpec& spec, const GaussianPortState& out) {
  const double total = out.photons(0) + out.photons(1) + spec.pump_flux();
  if (!(total > 0.0)) throw DomainError("shot_noise_limit: no photons in the budget");
  return 1.0 / std::sqrt(total);
}

Improvement improvement_factor(const SensorSpec& spec, const CavityRates& rates, const Injection& inj) {
  Improvement imp;
  imp.factor = phase_sensitivity_coherent(spec) / phase_sensitivity_squeezed(spec, rates, inj);
  imp.decay_ratio = rates.gamma() > 0.0 ? rates.kappa() / rates.gamma() : std::numeric_limits<double>::infinity();
  return imp;
}

double critical_length(double alpha_loss) {
  if (!(alpha_loss > 0.0)) throw DomainError("critical_length: alpha_loss must be > 0");
  return 2.0 / alpha_loss;
}

double pole_coherent_amplitude(const CavityRates& rates, const Injection& inj) {
  return std::sqrt(2.0 * photon_flux(rates, inj));
}

std::vector<PhaseScanPoint> sensitivity_vs_phase(const SensorSpec& spec, const std::optional<OutputMoments>& pair,
                                                 const std::vector<double>& phis) {
  std::vector<PhaseScanPoint> scan;
  scan.reserve(phis.size());
  for (double phi : phis) {
    SensorSpec at = spec;
    at.phi = phi;
    PhaseScanPoint p{phi, 0.0, false};
    try {
      p.dphi = phase_sensitivity_numeric(at, pair).dphi;
    } catch (const PoleError&) {
      p.dphi = std::numeric_limits<double>::infinity();
      p.pole = true;
    }
    scan.push_back(p);
  }
  return scan;
}

double short_length_improvement(double decay_ratio, double kappa, double sigma_n, double alpha_c) {
  if (!(decay_ratio > 0.0)) throw DomainError("decay ratio must be > 0");
  const CavityRates rates(kappa, kappa / decay_ratio);
  SensorSpec spec;
  spec.phi = std::numbers::pi / 2.0;
  spec.eta = 1.0;
  spec.alpha_c = alpha_c;
  return improvement_factor(spec, rates, Injection::normalized(sigma_n, rates)).factor;
}

double improvement_trend(double decay_ratio) { return 10.218 * std::log(decay_ratio + 143.47) - 49.816; }

}  // namespace tmsi
