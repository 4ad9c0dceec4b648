#pragma once

// Moment dynamics of the pumped ring beyond the undepleted-pump approximation.
//
// Both models are written in the frame rotating at the carrier frequencies with
// a resonant drive, so their steady states are fixed points. All intracavity
// modes decay at the total rate Γ = κ + γ.

#include <array>
#include <functional>

#include "tmsi/params.hpp"

namespace tmsi {

struct MomentState {
  cplx ap;          ///< ⟨a_p⟩
  cplx app;         ///< ⟨a_p a_p⟩
  double np = 0.0;  ///< ⟨a_p†a_p⟩
  double ns = 0.0;  ///< ⟨a_s†a_s⟩
  double ni = 0.0;  ///< ⟨a_i†a_i⟩
  cplx msi;         ///< ⟨a_s a_i⟩

  std::array<double, 9> pack() const;
  static MomentState unpack(const std::array<double, 9>& v);
};

enum class Integrator { FixedRk4, AdaptiveDopri5 };

struct SolverConfig {
  double dt = 0.0;
  double t_max = 0.0;
  double convergence_tol = 1e-9;
  Integrator method = Integrator::FixedRk4;
  double unit_time = 0.0;  ///< window over which the relative change is measured (1/Γ)

  static SolverConfig defaults_for(const CavityRates& rates);
  /// Long-horizon adaptive configuration for runs close to threshold, where the
  /// relaxation time grows like 1/(Γ(1−σ_n)).
  static SolverConfig near_threshold(const CavityRates& rates);
  void validate() const;
};

struct SteadyStateResult {
  MomentState state;
  double t_final = 0.0;
  double last_change = 0.0;
};

using MomentDerivative = std::function<MomentState(const MomentState&)>;

/// Full pump-depletion model with the pump–pair factorization closure.
/// alpha_l is the waveguide pump amplitude in √Hz.
MomentState mf_derivatives(const MomentState& s, const CavityRates& rates, double g, cplx alpha_l);

/// Undepleted-pump model: only (ns, ni, msi) evolve, σ is an external constant.
MomentState lin_derivatives(const MomentState& s, const CavityRates& rates, cplx sigma);

/// Integrates until the largest relative change over one cfg.unit_time window
/// drops below cfg.convergence_tol. Throws DivergenceError when a moment exceeds
/// 1e30 and NonConvergenceError when t_max is reached first.
SteadyStateResult steady_state(const MomentDerivative& f, const MomentState& initial, const SolverConfig& cfg);

/// Waveguide amplitude α_l that gives |σ| = σ_n·Γ in the undepleted model.
double drive_for_sigma_n(double sigma_n, const CavityRates& rates, double g);

/// Analytic fixed point of the undepleted model driven by α_l: pump moments of
/// the empty cavity plus ns = ni = s²/(2(1−s²)), msi = σ(2ns+1)/(2Γ).
MomentState linearized_fixed_point(const CavityRates& rates, double g, cplx alpha_l);

struct ModelComparison {
  double sigma_n = 0.0;
  MomentState linear;
  MomentState meanfield;
  double relative_deviation = 0.0;  ///< |ns_lin − ns_MF| / ns_MF
};

/// Steady states of both models at σ_n. The linearized state is analytic; the
/// mean-field state is integrated from vacuum.
ModelComparison compare_models(double sigma_n, const CavityRates& rates, double g, const SolverConfig& cfg);

/// Mean-field steady state only (σ_n may exceed 1).
MomentState meanfield_steady_state(double sigma_n, const CavityRates& rates, double g, const SolverConfig& cfg);

/// Largest σ_n whose relative ns deviation stays within error_tol.
double validity_bound(const CavityRates& rates, double g, double error_tol, double resolution = 1e-7);
double validity_bound(const CavityRates& rates, double g, double error_tol, const SolverConfig& cfg,
                      double resolution = 1e-7);

}  // namespace tmsi
