#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "tmsi/cavity_io.hpp"
#include "tmsi/cli.hpp"
#include "tmsi/errors.hpp"
#include "tmsi/interferometer.hpp"
#include "tmsi/meanfield.hpp"

namespace tmsi::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDefaultSigmaN = 0.99895;
constexpr double kDefaultAlphaC = 1e5;

struct Context {
  CavityRates rates;
  double g;
  double omega_p;
  Injection injection;
  double pump_power;
  double alpha_c;
  double eta;
};

Context make_context(const RunConfig& cfg) {
  const CavityRates rates = derive_rates(cfg.geometry);
  const double g = fwm_gain(cfg.geometry).g;
  const double wp = pump_omega(cfg.geometry);
  const Injection inj = cfg.pump_power ? sigma_from_power(*cfg.pump_power, rates, g, wp, cfg.delta_p)
                                       : Injection::normalized(cfg.sigma_n.value_or(kDefaultSigmaN), rates);
  const double power = cfg.pump_power.value_or(inj.sigma_n * threshold_power(rates, g, wp, cfg.delta_p));
  double alpha_c = cfg.alpha_c.value_or(kDefaultAlphaC);
  if (cfg.coherent_power) alpha_c = std::abs(pump_amplitude(*cfg.coherent_power, wp));
  const double eta = cfg.sensor_length ? efficiency(cfg.geometry.alpha_loss, *cfg.sensor_length) : cfg.eta;
  return Context{rates, g, wp, inj, power, alpha_c, eta};
}

std::vector<double> grid(const Sweep& sweep, double start, double stop, int points, Scale scale) {
  const double a = sweep.start.value_or(start);
  const double b = sweep.stop.value_or(stop);
  const int n = sweep.points > 0 ? sweep.points : points;
  const Scale sc = sweep.start ? sweep.scale : scale;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    out[i] = sc == Scale::Log ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

// Evaluates rows concurrently; output order follows the grid.
std::vector<Row> evaluate(std::size_t count, const std::function<Row(std::size_t)>& point) {
  std::vector<Row> rows(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(count); ++i) {
    try {
      rows[i] = point(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

Row flagged(std::vector<double> values, std::size_t inf_from, const char* flag) {
  for (std::size_t k = inf_from; k < values.size(); ++k) values[k] = kInf;
  return Row{std::move(values), flag};
}

SensorSpec sensor_for(const RunConfig& cfg, const Context& ctx) {
  SensorSpec s;
  s.phi = cfg.phi;
  s.eta = ctx.eta;
  s.alpha_c = ctx.alpha_c;
  if (cfg.charge_pump) {
    s.pump_power = ctx.pump_power;
    s.pump_omega = ctx.omega_p;
  }
  return s;
}

ResultTable rates_table(const RunConfig& cfg) {
  const Context ctx = make_context(cfg);
  ResultTable t;
  t.columns = {"kappa", "gamma", "Gamma", "g", "threshold_power", "t_round", "decay_ratio", "sigma_n", "pump_power"};
  const double pth = threshold_power(ctx.rates, ctx.g, ctx.omega_p, cfg.delta_p);
  const double dr = ctx.rates.gamma() > 0 ? ctx.rates.decay_ratio() : kInf;
  t.rows.push_back(Row{{ctx.rates.kappa(), ctx.rates.gamma(), ctx.rates.total(), ctx.g, pth, ctx.rates.t_round(), dr,
                        ctx.injection.sigma_n, ctx.pump_power},
                       ""});
  return t;
}

ResultTable squeezing_table(const RunConfig& cfg) {
  const Context ctx = make_context(cfg);
  const bool over_sigma = cfg.sweep.variable == "sigma_n";
  const std::vector<double> xs = over_sigma ? grid(cfg.sweep, 0.0, 0.999, 200, Scale::Linear)
                                            : grid(cfg.sweep, 0.0, std::numbers::pi, 181, Scale::Linear);
  ResultTable t;
  t.columns = {"sigma_n", "phi_lo", "variance", "variance_db", "squeezed_db", "anti_squeezed_db"};
  t.rows = evaluate(xs.size(), [&](std::size_t i) {
    const Injection inj = over_sigma ? Injection::from_sigma(xs[i] * ctx.rates.total(), ctx.rates) : ctx.injection;
    const double phi = over_sigma ? cfg.phi_lo : xs[i];
    std::vector<double> v{inj.sigma_n, phi};
    try {
      const double var = quadrature_variance(ctx.rates, inj, phi);
      const VarianceExtrema ex = variance_extrema(ctx.rates, inj);
      v.insert(v.end(), {var, to_db(var), to_db(ex.squeezed), to_db(ex.anti_squeezed)});
      return Row{v, ""};
    } catch (const ThresholdError&) {
      v.resize(6);
      return flagged(v, 2, "threshold");
    }
  });
  return t;
}

ResultTable jsi_table(const RunConfig& cfg) {
  const Context ctx = make_context(cfg);
  const double span = 3.0 * ctx.rates.total();
  const std::vector<double> axis = grid(cfg.sweep, -span, span, 200, Scale::Linear);
  const std::size_t n = axis.size();
  ResultTable t;
  t.columns = {"delta_ws", "delta_wi", "jsi", "jsi_normalized"};
  double peak = kNaN;
  bool above = false;
  try {
    peak = jsi(ctx.rates, ctx.injection, 0.0, 0.0);
  } catch (const ThresholdError&) {
    above = true;
  }
  t.rows = evaluate(n * n, [&](std::size_t k) {
    const double ws = axis[k / n];
    const double wi = axis[k % n];
    if (above) return flagged({ws, wi, 0.0, 0.0}, 2, "threshold");
    const double v = jsi(ctx.rates, ctx.injection, ws, wi);
    return Row{{ws, wi, v, peak > 0 ? v / peak : 0.0}, ""};
  });
  return t;
}

ResultTable meanfield_table(const RunConfig& cfg) {
  const Context ctx = make_context(cfg);
  const std::vector<double> xs = grid(cfg.sweep, 0.5, 1.2, 71, Scale::Linear);
  const SolverConfig solver = SolverConfig::near_threshold(ctx.rates);
  ResultTable t;
  t.columns = {"sigma_n", "ns_lin", "ns_mf", "np_lin", "np_mf", "relative_deviation"};
  t.rows = evaluate(xs.size(), [&](std::size_t i) {
    const double sn = xs[i];
    const double alpha_l = drive_for_sigma_n(sn, ctx.rates, ctx.g);
    const double np_lin = 4.0 * ctx.rates.kappa() * alpha_l * alpha_l / (ctx.rates.total() * ctx.rates.total());
    std::string flag;
    double ns_lin = kInf;
    try {
      if (sn >= 1.0) throw ThresholdError("sigma_n = " + std::to_string(sn));
      ns_lin = linearized_fixed_point(ctx.rates, ctx.g, alpha_l).ns;
    } catch (const ThresholdError&) {
      flag = "threshold";
    }
    double ns_mf = kNaN, np_mf = kNaN;
    try {
      const MomentState s = meanfield_steady_state(sn, ctx.rates, ctx.g, solver);
      ns_mf = s.ns;
      np_mf = s.np;
    } catch (const DivergenceError&) {
      flag = "divergence";
    } catch (const NonConvergenceError&) {
      flag = "nonconvergence";
    }
    const double dev = std::isfinite(ns_lin) && ns_mf > 0 ? std::abs(ns_lin - ns_mf) / ns_mf : kInf;
    return Row{{sn, ns_lin, ns_mf, np_lin, np_mf, dev}, flag};
  });
  return t;
}

ResultTable sensitivity_table(const RunConfig& cfg) {
  const Context ctx = make_context(cfg);
  const std::string& var = cfg.sweep.variable;
  std::vector<double> xs;
  if (var == "coherent_power") xs = grid(cfg.sweep, 1e-12, 1e-1, 221, Scale::Log);
  if (var == "alpha_c") xs = grid(cfg.sweep, 1e2, 1e9, 141, Scale::Log);
  if (var == "phi") xs = grid(cfg.sweep, 0.0, 2.0 * std::numbers::pi, 361, Scale::Linear);
  if (var == "eta") xs = grid(cfg.sweep, 0.05, 1.0, 96, Scale::Linear);
  if (var == "sigma_n") xs = grid(cfg.sweep, 0.0, 0.999, 200, Scale::Linear);

  ResultTable t;
  t.columns = {var, "sigma_n", "alpha_c", "eta", "phi", "dphi_coherent", "dphi_squeezed", "snl", "improvement"};
  t.rows = evaluate(xs.size(), [&](std::size_t i) {
    SensorSpec s = sensor_for(cfg, ctx);
    Injection inj = ctx.injection;
    const double x = xs[i];
    if (var == "coherent_power") s.alpha_c = std::abs(pump_amplitude(x, ctx.omega_p));
    if (var == "alpha_c") s.alpha_c = x;
    if (var == "phi") s.phi = x;
    if (var == "eta") s.eta = x;
    if (var == "sigma_n") {
      inj = Injection::from_sigma(x * ctx.rates.total(), ctx.rates);
      if (cfg.charge_pump) s.pump_power = x * threshold_power(ctx.rates, ctx.g, ctx.omega_p, cfg.delta_p);
    }
    std::vector<double> v{x, inj.sigma_n, std::abs(s.alpha_c), s.eta, s.phi};
    double coherent = kInf;
    try {
      coherent = phase_sensitivity_numeric(s, std::nullopt).dphi;
    } catch (const PoleError&) {
    }
    try {
      const SensitivityReport rep = phase_sensitivity_numeric(s, output_moments(ctx.rates, inj));
      v.insert(v.end(), {coherent, rep.dphi, rep.snl, coherent / rep.dphi});
      return Row{v, ""};
    } catch (const ThresholdError&) {
      v.insert(v.end(), {coherent, 0, 0, 0});
      return flagged(v, 6, "threshold");
    } catch (const PoleError&) {
      const GaussianPortState out = mzi_transform(GaussianPortState::sensor_input(s.alpha_c, output_moments(ctx.rates, inj)), s);
      v.insert(v.end(), {coherent, kInf, shot_noise_limit(s, out), 0.0});
      return Row{v, "pole"};
    }
  });
  return t;
}

ResultTable pole_table(const RunConfig& cfg) {
  const Context ctx = make_context(cfg);
  const double pole = pole_coherent_amplitude(ctx.rates, ctx.injection);
  const std::vector<double> xs = grid(cfg.sweep, 0.1 * pole, 10.0 * pole, 201, Scale::Log);
  ResultTable t;
  t.columns = {"alpha_c", "alpha_c_over_pole", "dphi_coherent", "dphi_squeezed"};
  t.rows = evaluate(xs.size(), [&](std::size_t i) {
    SensorSpec s = sensor_for(cfg, ctx);
    s.phi = std::numbers::pi / 2.0;
    s.alpha_c = xs[i];
    const std::vector<double> v{xs[i], pole > 0 ? xs[i] / pole : kInf, phase_sensitivity_coherent(s)};
    try {
      std::vector<double> full = v;
      full.push_back(phase_sensitivity_squeezed(s, ctx.rates, ctx.injection));
      return Row{full, ""};
    } catch (const PoleError&) {
      std::vector<double> full = v;
      full.push_back(kInf);
      return Row{full, "pole"};
    }
  });
  return t;
}

ResultTable improvement_table(const RunConfig& cfg) {
  const Context ctx = make_context(cfg);
  std::vector<double> ratios = cfg.decay_ratios;
  if (ratios.empty()) ratios.push_back(ctx.rates.gamma() > 0 ? ctx.rates.decay_ratio() : kInf);
  const std::vector<double> lengths = grid(cfg.sweep, 1e-3, 100.0, 201, Scale::Log);
  ResultTable t;
  t.columns = {"decay_ratio", "sensor_length", "eta", "improvement"};
  const std::size_t n = lengths.size();
  t.rows = evaluate(ratios.size() * n, [&](std::size_t k) {
    const double dr = ratios[k / n];
    const double length = lengths[k % n];
    const CavityRates rates(ctx.rates.kappa(), std::isinf(dr) ? 0.0 : ctx.rates.kappa() / dr);
    const Injection inj =
        cfg.pump_power ? sigma_from_power(*cfg.pump_power, rates, ctx.g, ctx.omega_p, cfg.delta_p)
                       : Injection::normalized(cfg.sigma_n.value_or(kDefaultSigmaN), rates);
    SensorSpec s = sensor_for(cfg, ctx).with_length(length, cfg.geometry.alpha_loss);
    s.phi = std::numbers::pi / 2.0;
    std::vector<double> v{dr, length, s.eta};
    try {
      v.push_back(improvement_factor(s, rates, inj).factor);
      return Row{v, ""};
    } catch (const ThresholdError&) {
      v.push_back(0.0);
      return flagged(v, 3, "threshold");
    } catch (const PoleError&) {
      v.push_back(0.0);
      return flagged(v, 3, "pole");
    }
  });
  return t;
}

}  // namespace

ResultTable run_command(const RunConfig& cfg) {
  ResultTable t;
  if (cfg.command == "rates") t = rates_table(cfg);
  else if (cfg.command == "squeezing") t = squeezing_table(cfg);
  else if (cfg.command == "jsi") t = jsi_table(cfg);
  else if (cfg.command == "meanfield") t = meanfield_table(cfg);
  else if (cfg.command == "sensitivity") t = sensitivity_table(cfg);
  else if (cfg.command == "pole") t = pole_table(cfg);
  else if (cfg.command == "improvement") t = improvement_table(cfg);
  else throw ConfigError("command", -1, "unknown command '" + cfg.command + "'");
  t.metadata["command"] = cfg.command;
  t.metadata["config_sha256"] = sha256_hex(cfg.canonical());
  return t;
}

}  // namespace tmsi::cli
