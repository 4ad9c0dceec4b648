#include "tmsi/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "tmsi/errors.hpp"

namespace tmsi {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 9>;

constexpr double kDivergenceLimit = 1e30;

double relative_change(cplx now, cplx before) {
  const double scale = std::max(std::abs(now), std::abs(before));
  return scale > 0.0 ? std::abs(now - before) / scale : 0.0;
}

double max_relative_change(const MomentState& now, const MomentState& before) {
  return std::max({relative_change(now.ap, before.ap), relative_change(now.app, before.app),
                   relative_change(now.np, before.np), relative_change(now.ns, before.ns),
                   relative_change(now.ni, before.ni), relative_change(now.msi, before.msi)});
}

bool diverged(const State& x) {
  return std::any_of(x.begin(), x.end(), [](double v) { return !std::isfinite(v) || std::abs(v) > kDivergenceLimit; });
}

}  // namespace

std::array<double, 9> MomentState::pack() const {
  return {ap.real(), ap.imag(), app.real(), app.imag(), np, ns, ni, msi.real(), msi.imag()};
}

MomentState MomentState::unpack(const std::array<double, 9>& v) {
  MomentState s;
  s.ap = {v[0], v[1]};
  s.app = {v[2], v[3]};
  s.np = v[4];
  s.ns = v[5];
  s.ni = v[6];
  s.msi = {v[7], v[8]};
  return s;
}

SolverConfig SolverConfig::defaults_for(const CavityRates& rates) {
  const double tau = 1.0 / rates.total();
  return SolverConfig{0.01 * tau, 200.0 * tau, 1e-9, Integrator::FixedRk4, tau};
}

SolverConfig SolverConfig::near_threshold(const CavityRates& rates) {
  const double tau = 1.0 / rates.total();
  return SolverConfig{0.01 * tau, 1e7 * tau, 1e-9, Integrator::AdaptiveDopri5, tau};
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw DomainError("solver: dt must be > 0");
  if (!(t_max > 0.0)) throw DomainError("solver: t_max must be > 0");
  if (!(convergence_tol > 0.0)) throw DomainError("solver: convergence_tol must be > 0");
  if (!(unit_time > 0.0)) throw DomainError("solver: unit_time must be > 0");
}

MomentState mf_derivatives(const MomentState& s, const CavityRates& rates, double g, cplx alpha_l) {
  const double big_gamma = rates.total();
  const cplx drive = std::sqrt(rates.kappa()) * alpha_l;
  const double pair_gain = 2.0 * g * std::real(s.app * std::conj(s.msi));

  MomentState d;
  d.ap = -big_gamma / 2.0 * s.ap - 2.0 * g * std::conj(s.ap) * s.msi + drive;
  d.app = -big_gamma * s.app + 2.0 * drive * s.ap - 2.0 * g * (2.0 * s.np + 1.0) * s.msi;
  d.np = -4.0 * g * std::real(std::conj(s.app) * s.msi) + 2.0 * std::real(std::conj(drive) * s.ap) -
         big_gamma * s.np;
  d.ns = pair_gain - big_gamma * s.ns;
  d.ni = pair_gain - big_gamma * s.ni;
  d.msi = g * s.app * (s.ns + s.ni + 1.0) - big_gamma * s.msi;
  return d;
}

MomentState lin_derivatives(const MomentState& s, const CavityRates& rates, cplx sigma) {
  const double big_gamma = rates.total();
  const double pair_gain = std::real(std::conj(sigma) * s.msi);

  MomentState d;
  d.ns = pair_gain - big_gamma * s.ns;
  d.ni = pair_gain - big_gamma * s.ni;
  d.msi = sigma / 2.0 * (s.ns + s.ni + 1.0) - big_gamma * s.msi;
  return d;
}

SteadyStateResult steady_state(const MomentDerivative& f, const MomentState& initial, const SolverConfig& cfg) {
  cfg.validate();
  auto system = [&f](const State& x, State& dxdt, double /*t*/) { dxdt = f(MomentState::unpack(x)).pack(); };

  State x = initial.pack();
  MomentState before = initial;
  double t = 0.0;
  double change = 0.0;
  const auto steps_per_window = static_cast<std::size_t>(std::max(1.0, std::round(cfg.unit_time / cfg.dt)));
  const double fixed_dt = cfg.unit_time / static_cast<double>(steps_per_window);
  odeint::runge_kutta4<State> rk4;
  auto dopri = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-14, 1e-12);

  while (t < cfg.t_max) {
    if (cfg.method == Integrator::FixedRk4) {
      odeint::integrate_n_steps(rk4, system, x, t, fixed_dt, steps_per_window);
    } else {
      odeint::integrate_adaptive(dopri, system, x, t, t + cfg.unit_time, cfg.dt);
    }
    t += cfg.unit_time;
    if (diverged(x)) {
      throw DivergenceError("steady_state: moments exceeded 1e30 at t = " + std::to_string(t) + " s");
    }
    const MomentState now = MomentState::unpack(x);
    change = max_relative_change(now, before);
    if (change < cfg.convergence_tol) return SteadyStateResult{now, t, change};
    before = now;
  }
  throw NonConvergenceError("steady_state: no convergence by t_max = " + std::to_string(cfg.t_max) +
                            " s (last relative change " + std::to_string(change) + ")");
}

double drive_for_sigma_n(double sigma_n, const CavityRates& rates, double g) {
  if (!(sigma_n >= 0.0)) throw DomainError("sigma_n must be >= 0");
  if (!(g > 0.0)) throw DomainError("g must be > 0");
  const double big_gamma = rates.total();
  return big_gamma * std::sqrt(sigma_n * big_gamma / (2.0 * g)) / (2.0 * std::sqrt(rates.kappa()));
}

MomentState linearized_fixed_point(const CavityRates& rates, double g, cplx alpha_l) {
  const double big_gamma = rates.total();
  MomentState s;
  s.ap = 2.0 * std::sqrt(rates.kappa()) * alpha_l / big_gamma;
  s.app = s.ap * s.ap;
  s.np = std::norm(s.ap);
  const cplx sigma = 2.0 * g * s.app;
  const double ratio2 = std::norm(sigma) / (big_gamma * big_gamma);
  if (!(ratio2 < 1.0)) throw ThresholdError("linearized_fixed_point: no fixed point for sigma_n >= 1");
  s.ns = ratio2 / (2.0 * (1.0 - ratio2));
  s.ni = s.ns;
  s.msi = sigma * (2.0 * s.ns + 1.0) / (2.0 * big_gamma);
  return s;
}

MomentState meanfield_steady_state(double sigma_n, const CavityRates& rates, double g, const SolverConfig& cfg) {
  const cplx alpha_l = drive_for_sigma_n(sigma_n, rates, g);
  const auto f = [&](const MomentState& s) { return mf_derivatives(s, rates, g, alpha_l); };
  return steady_state(f, MomentState{}, cfg).state;
}

ModelComparison compare_models(double sigma_n, const CavityRates& rates, double g, const SolverConfig& cfg) {
  ModelComparison c;
  c.sigma_n = sigma_n;
  c.linear = linearized_fixed_point(rates, g, drive_for_sigma_n(sigma_n, rates, g));
  c.meanfield = meanfield_steady_state(sigma_n, rates, g, cfg);
  c.relative_deviation =
      c.meanfield.ns > 0.0 ? std::abs(c.linear.ns - c.meanfield.ns) / c.meanfield.ns : 0.0;
  return c;
}

double validity_bound(const CavityRates& rates, double g, double error_tol, const SolverConfig& cfg,
                      double resolution) {
  if (!(error_tol > 0.0 && error_tol <= 0.5)) throw DomainError("validity_bound: error_tol must lie in (0, 0.5]");
  // The linearized photon number diverges at σ_n = 1, so 1 always fails.
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (compare_models(mid, rates, g, cfg).relative_deviation <= error_tol) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double validity_bound(const CavityRates& rates, double g, double error_tol, double resolution) {
  return validity_bound(rates, g, error_tol, SolverConfig::near_threshold(rates), resolution);
}

}  // namespace tmsi
