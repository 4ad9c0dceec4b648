#include "tmsi/cavity_io.hpp"

#include <cmath>
#include <string>

#include "tmsi/errors.hpp"

namespace tmsi {

namespace {

constexpr double kMaxCondition = 1e12;

void require_below_threshold(const CavityRates& rates, const Injection& inj, const char* where) {
  if (!(inj.sigma_mag < rates.total())) {
    throw ThresholdError(std::string(where) + ": sigma_n = " + std::to_string(inj.sigma_mag / rates.total()));
  }
}

// Ξ − 2σ²Γ², the common denominator of the fluctuating moments, arranged so
// that the zero-detuning value (Γ²−σ²)² carries no cancellation.
double pair_denominator(double big_gamma, double s, const Detunings& d) {
  const double p = 4.0 * d.delta_i * d.delta_s;
  const double gap = (big_gamma - s) * (big_gamma + s);
  return p * p - 2.0 * p * s * s + gap * gap +
         4.0 * big_gamma * big_gamma * (d.delta_i * d.delta_i + d.delta_s * d.delta_s);
}

}  // namespace

Matrix4c drift_matrix(const CavityRates& rates, const Injection& inj, const Detunings& det) {
  const double half_loss = rates.gamma() / 2.0;
  const cplx half_sigma = inj.sigma() / 2.0;
  const cplx i(0.0, 1.0);
  Matrix4c k = Matrix4c::Zero();
  k(0, 0) = i * det.delta_s - half_loss;
  k(1, 1) = -i * det.delta_s - half_loss;
  k(2, 2) = i * det.delta_i - half_loss;
  k(3, 3) = -i * det.delta_i - half_loss;
  k(0, 3) = half_sigma;
  k(1, 2) = std::conj(half_sigma);
  k(2, 1) = half_sigma;
  k(3, 0) = std::conj(half_sigma);
  return k;
}

TransferMatrices output_transfer(const CavityRates& rates, const Injection& inj, const Detunings& det) {
  if (!(rates.kappa() > 0.0)) throw DomainError("output_transfer: kappa must be > 0");
  const Matrix4c freq_minus_drift = -drift_matrix(rates, inj, det);
  const Matrix4c identity = Matrix4c::Identity();
  const Matrix4c propagator = freq_minus_drift + rates.kappa() / 2.0 * identity;

  Eigen::JacobiSVD<Matrix4c> svd(propagator);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0) || sv(0) / smallest > kMaxCondition) {
    throw ThresholdError("output_transfer: cavity propagator is singular (sigma_n = " +
                         std::to_string(inj.sigma_n) + ")");
  }

  const Matrix4c reflect = (freq_minus_drift - rates.kappa() / 2.0 * identity) * propagator.inverse();
  TransferMatrices t;
  t.s_in = -reflect;
  t.s_gamma = -std::sqrt(rates.gamma() / rates.kappa()) * (reflect - identity);
  return t;
}

OutputMoments moments_from_transfer(const TransferMatrices& t, const SeedAmplitudes& seeds) {
  OutputMoments out;
  // Vacuum inputs only pair an annihilator with its own creator: ⟨b b†⟩ = 1.
  for (int j : {1, 3}) {
    out.n_s += std::norm(t.s_in(0, j)) + std::norm(t.s_gamma(0, j));
    out.n_i += std::norm(t.s_in(2, j)) + std::norm(t.s_gamma(2, j));
  }
  for (int j : {0, 2}) {
    out.m_si += t.s_in(2, j) * t.s_in(0, j + 1) + t.s_gamma(2, j) * t.s_gamma(0, j + 1);
  }
  Eigen::Matrix<cplx, 4, 1> b_in;
  b_in << seeds.alpha_s, std::conj(seeds.alpha_s), seeds.alpha_i, std::conj(seeds.alpha_i);
  const Eigen::Matrix<cplx, 4, 1> b_out = t.s_in * b_in;
  out.first_s = b_out(0);
  out.first_i = b_out(2);
  return out;
}

double photon_flux(const CavityRates& rates, const Injection& inj, const Detunings& det) {
  require_below_threshold(rates, inj, "photon_flux");
  const double s = inj.sigma_mag;
  const double big_gamma = rates.total();
  return 4.0 * s * s * rates.kappa() * big_gamma / pair_denominator(big_gamma, s, det);
}

cplx anomalous_moment(const CavityRates& rates, const Injection& inj, const Detunings& det) {
  require_below_threshold(rates, inj, "anomalous_moment");
  const double s = inj.sigma_mag;
  const double big_gamma = rates.total();
  const cplx bracket(4.0 * det.delta_i * det.delta_s - big_gamma * big_gamma - s * s,
                     -2.0 * big_gamma * (det.delta_i + det.delta_s));
  return -2.0 * rates.kappa() * s * bracket / pair_denominator(big_gamma, s, det) *
         std::polar(1.0, inj.phi_sigma);
}

std::pair<cplx, cplx> static_moments(const CavityRates& rates, const Injection& inj, const Detunings& det,
                                     const SeedAmplitudes& seeds) {
  require_below_threshold(rates, inj, "static_moments");
  const double kappa = rates.kappa();
  const double gamma = rates.gamma();
  const double big_gamma = rates.total();
  const double s = inj.sigma_mag;
  const cplx sigma = inj.sigma();
  const double ds = det.delta_s;
  const double di = det.delta_i;
  const double common = kappa * kappa + s * s - gamma * gamma - 4.0 * di * ds;

  // One expression serves both outputs with the signal/idler labels swapped.
  auto mode = [&](cplx own, cplx partner, double d_own, double d_partner) {
    const cplx self(common, -2.0 * (d_partner * (gamma - kappa) - d_own * big_gamma));
    const cplx denom(4.0 * di * ds + big_gamma * big_gamma - s * s, 2.0 * big_gamma * (d_partner - d_own));
    return (own * self + 2.0 * kappa * sigma * std::conj(partner)) / denom;
  };
  return {mode(seeds.alpha_s, seeds.alpha_i, ds, di), mode(seeds.alpha_i, seeds.alpha_s, di, ds)};
}

OutputMoments output_moments(const CavityRates& rates, const Injection& inj, const Detunings& det,
                             const SeedAmplitudes& seeds) {
  OutputMoments out;
  out.n_s = photon_flux(rates, inj, det);
  // Pair symmetry: the idler expression is the signal one with Δ_s ↔ Δ_i,
  // and Ξ is symmetric under that exchange.
  out.n_i = out.n_s;
  out.m_si = anomalous_moment(rates, inj, det);
  std::tie(out.first_s, out.first_i) = static_moments(rates, inj, det, seeds);
  return out;
}

double intracavity_number(const CavityRates& rates, const Injection& inj) {
  require_below_threshold(rates, inj, "intracavity_number");
  const double s = inj.sigma_mag;
  const double big = rates.total();
  return s * s / (2.0 * (big - s) * (big + s));
}

double jsi(const CavityRates& rates, const Injection& inj, double delta_ws, double delta_wi) {
  require_below_threshold(rates, inj, "jsi");
  const double s2 = inj.sigma_mag * inj.sigma_mag;
  const double g2 = rates.total() * rates.total();
  const double k2 = rates.kappa() * rates.kappa();
  const double product = delta_ws * delta_wi;
  const double lambda =
      16.0 * product * product + 8.0 * product * s2 + 4.0 * g2 * (delta_ws * delta_ws + delta_wi * delta_wi);
  const double plus = g2 + s2;
  const double minus = (rates.total() - inj.sigma_mag) * (rates.total() + inj.sigma_mag);
  const double denom = lambda + minus * minus;
  return (16.0 * k2 * s2 * s2 * g2 + 4.0 * k2 * s2 * (lambda + plus * plus)) / (denom * denom);
}

VarianceExtrema variance_extrema(const CavityRates& rates, const Injection& inj) {
  require_below_threshold(rates, inj, "variance_extrema");
  const double s = inj.sigma_mag;
  const double big_gamma = rates.total();
  const double pump_term = 4.0 * rates.kappa() * s;
  return VarianceExtrema{1.0 - pump_term / ((big_gamma + s) * (big_gamma + s)),
                         1.0 + pump_term / ((big_gamma - s) * (big_gamma - s))};
}

double quadrature_variance(const CavityRates& rates, const Injection& inj, double phi_lo) {
  // 1 + 2n + 2Re(m e^{2iφ}) rewritten as a cos²/sin² blend of the extrema,
  // which avoids cancelling two ~1e6 terms near threshold.
  const VarianceExtrema v = variance_extrema(rates, inj);
  const double phi = phi_lo + inj.phi_sigma / 2.0;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return c * c * v.anti_squeezed + s * s * v.squeezed;
}

double squeezing_parameter(const CavityRates& rates, const Injection& inj, const Detunings& det) {
  return std::asinh(std::sqrt(photon_flux(rates, inj, det)));
}

HomodyneReading homodyne_signal(const OutputMoments& out, double lo_amplitude, double phi_lo) {
  const cplx lo_phase = std::polar(1.0, phi_lo);
  const double lo2 = lo_amplitude * lo_amplitude;
  HomodyneReading r;
  r.mean = 2.0 * lo_amplitude * std::real((out.first_s + out.first_i) * lo_phase);
  // ⟨(Y e^{iφ} + h.c.)²⟩ for Y = b_s + b_i, using [Y, Y†] = 2.
  const double y_sq = 2.0 * (out.n_s + out.n_i) + 2.0 + 4.0 * std::real(out.m_si * lo_phase * lo_phase);
  r.variance = lo2 * y_sq;
  return r;
}

}  // namespace tmsi
