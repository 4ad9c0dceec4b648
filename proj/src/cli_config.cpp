#include "tmsi/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace tmsi::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_number(const Assignment& a) {
  double v = 0.0;
  const char* begin = a.value.data();
  const char* end = begin + a.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(a.key, a.line, "expected a finite number, got '" + a.value + "'");
  }
  return v;
}

int to_count(const Assignment& a) {
  const double v = to_number(a);
  if (v != std::floor(v) || v < 0 || v > 1e7) throw ConfigError(a.key, a.line, "expected a non-negative integer");
  return static_cast<int>(v);
}

bool to_flag(const Assignment& a) {
  if (a.value == "1" || a.value == "true" || a.value == "yes") return true;
  if (a.value == "0" || a.value == "false" || a.value == "no") return false;
  throw ConfigError(a.key, a.line, "expected true/false");
}

std::vector<double> to_list(const Assignment& a) {
  std::vector<double> out;
  std::stringstream ss(a.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(Assignment{a.key, trim(item), a.line}));
  return out;
}

void require(bool ok, const Assignment& a, const std::string& rule) {
  if (!ok) throw ConfigError(a.key, a.line, "out of range: must satisfy " + rule);
}

using Setter = std::function<void(RunConfig&, const Assignment&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"geometry.ring_length",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.ring_length = to_number(a);
         require(c.geometry.ring_length > 0, a, "> 0");
       }},
      {"geometry.n_eff",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.n_eff = to_number(a);
         require(c.geometry.n_eff >= 1, a, ">= 1");
       }},
      {"geometry.n_g",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.n_g = to_number(a);
         require(c.geometry.n_g >= 1, a, ">= 1");
       }},
      {"geometry.cross_coupling",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.cross_coupling = to_number(a);
         require(c.geometry.cross_coupling >= 0 && c.geometry.cross_coupling <= 1, a, "0 <= x <= 1");
       }},
      {"geometry.alpha_loss",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.alpha_loss = to_number(a);
         require(c.geometry.alpha_loss >= 0, a, ">= 0");
       }},
      {"geometry.n2",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.n2 = to_number(a);
         require(c.geometry.n2 >= 0, a, ">= 0");
       }},
      {"geometry.a_eff",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.a_eff = to_number(a);
         require(c.geometry.a_eff > 0, a, "> 0");
       }},
      {"geometry.lambda_p",
       [](RunConfig& c, const Assignment& a) {
         c.geometry.lambda_p = to_number(a);
         require(c.geometry.lambda_p > 0, a, "> 0");
       }},
      {"pump.power",
       [](RunConfig& c, const Assignment& a) {
         c.pump_power = to_number(a);
         require(*c.pump_power >= 0, a, ">= 0");
       }},
      {"pump.sigma_n",
       [](RunConfig& c, const Assignment& a) {
         c.sigma_n = to_number(a);
         require(*c.sigma_n >= 0, a, ">= 0");
       }},
      {"pump.delta_p", [](RunConfig& c, const Assignment& a) { c.delta_p = to_number(a); }},
      {"pump.alpha_c",
       [](RunConfig& c, const Assignment& a) {
         c.alpha_c = to_number(a);
         require(*c.alpha_c > 0, a, "> 0");
       }},
      {"pump.coherent_power",
       [](RunConfig& c, const Assignment& a) {
         c.coherent_power = to_number(a);
         require(*c.coherent_power > 0, a, "> 0");
       }},
      {"sensor.phi", [](RunConfig& c, const Assignment& a) { c.phi = to_number(a); }},
      {"sensor.eta",
       [](RunConfig& c, const Assignment& a) {
         c.eta = to_number(a);
         require(c.eta > 0 && c.eta <= 1, a, "0 < eta <= 1");
       }},
      {"sensor.sensor_length",
       [](RunConfig& c, const Assignment& a) {
         c.sensor_length = to_number(a);
         require(*c.sensor_length >= 0, a, ">= 0");
       }},
      {"sensor.charge_pump", [](RunConfig& c, const Assignment& a) { c.charge_pump = to_flag(a); }},
      {"squeezing.phi_lo", [](RunConfig& c, const Assignment& a) { c.phi_lo = to_number(a); }},
      {"improvement.decay_ratios",
       [](RunConfig& c, const Assignment& a) {
         c.decay_ratios = to_list(a);
         for (double d : c.decay_ratios) require(d > 0, a, "every entry > 0");
       }},
      {"sweep.variable", [](RunConfig& c, const Assignment& a) { c.sweep.variable = a.value; }},
      {"sweep.start", [](RunConfig& c, const Assignment& a) { c.sweep.start = to_number(a); }},
      {"sweep.stop", [](RunConfig& c, const Assignment& a) { c.sweep.stop = to_number(a); }},
      {"sweep.points",
       [](RunConfig& c, const Assignment& a) {
         c.sweep.points = to_count(a);
         require(c.sweep.points >= 2, a, ">= 2");
       }},
      {"sweep.scale",
       [](RunConfig& c, const Assignment& a) {
         if (a.value == "linear") {
           c.sweep.scale = Scale::Linear;
         } else if (a.value == "log") {
           c.sweep.scale = Scale::Log;
         } else {
           throw ConfigError(a.key, a.line, "expected 'linear' or 'log'");
         }
       }},
  };
  return table;
}

const std::map<std::string, std::vector<std::string>>& sweep_variables() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"rates", {}},
      {"squeezing", {"phi_lo", "sigma_n"}},
      {"jsi", {"delta_w"}},
      {"meanfield", {"sigma_n"}},
      {"sensitivity", {"coherent_power", "alpha_c", "phi", "eta", "sigma_n"}},
      {"pole", {"alpha_c"}},
      {"improvement", {"sensor_length"}},
  };
  return table;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : std::runtime_error((line > 0    ? "line " + std::to_string(line) + ": "
                          : line == 0 ? std::string("--set: ")
                                      : std::string()) +
                         key + ": " + message),
      key_(key),
      line_(line) {}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"rates",       "squeezing", "jsi",        "meanfield",
                                                 "sensitivity", "pole",      "improvement"};
  return names;
}

std::vector<Assignment> read_assignments(const std::string& text) {
  std::vector<Assignment> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(body, line, "expected 'section.key = value'");
    Assignment a{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (a.key.find('.') == std::string::npos) throw ConfigError(a.key, line, "keys must be written as section.key");
    out.push_back(std::move(a));
  }
  return out;
}

RunConfig build_config(const std::vector<Assignment>& assignments, const std::string& command) {
  const auto& vars = sweep_variables();
  if (!vars.count(command)) throw ConfigError("command", -1, "unknown command '" + command + "'");
  RunConfig cfg;
  cfg.command = command;
  std::map<std::string, const Assignment*> seen;
  for (const auto& a : assignments) {
    const auto it = setters().find(a.key);
    if (it == setters().end()) throw ConfigError(a.key, a.line, "unknown key");
    if (a.value.empty()) throw ConfigError(a.key, a.line, "missing value");
    it->second(cfg, a);
    seen[a.key] = &a;
  }

  if (seen.count("pump.sigma_n") && seen.count("pump.power")) {
    const Assignment& a = *seen["pump.power"];
    throw ConfigError(a.key, a.line, "conflicts with pump.sigma_n; set only one of them");
  }
  if (seen.count("pump.alpha_c") && seen.count("pump.coherent_power")) {
    const Assignment& a = *seen["pump.coherent_power"];
    throw ConfigError(a.key, a.line, "conflicts with pump.alpha_c; set only one of them");
  }

  const bool sweep_given = seen.count("sweep.start") || seen.count("sweep.stop") || seen.count("sweep.points") ||
                           seen.count("sweep.scale") || seen.count("sweep.variable");
  const auto& allowed = vars.at(command);
  if (sweep_given && allowed.empty()) {
    throw ConfigError("sweep", -1, "command '" + command + "' does not take a sweep");
  }
  if ((seen.count("sweep.start") || seen.count("sweep.stop")) && !seen.count("sweep.variable")) {
    const Assignment& a = seen.count("sweep.start") ? *seen["sweep.start"] : *seen["sweep.stop"];
    throw ConfigError("sweep.variable", a.line, "required when sweep.start or sweep.stop is set");
  }
  if (seen.count("sweep.start") != seen.count("sweep.stop")) {
    const Assignment& a = seen.count("sweep.start") ? *seen["sweep.start"] : *seen["sweep.stop"];
    throw ConfigError(seen.count("sweep.start") ? "sweep.stop" : "sweep.start", a.line,
                      "sweep.start and sweep.stop must be set together");
  }
  if (!allowed.empty()) {
    if (cfg.sweep.variable.empty()) {
      cfg.sweep.variable = allowed.front();
    } else if (std::find(allowed.begin(), allowed.end(), cfg.sweep.variable) == allowed.end()) {
      const Assignment& a = *seen["sweep.variable"];
      throw ConfigError(a.key, a.line, "command '" + command + "' cannot sweep '" + a.value + "'");
    }
  }
  if (cfg.sweep.scale == Scale::Log && cfg.sweep.start && (*cfg.sweep.start <= 0 || *cfg.sweep.stop <= 0)) {
    throw ConfigError("sweep.scale", seen["sweep.scale"]->line, "log sweeps need positive start and stop");
  }
  return cfg;
}

RunConfig parse_config(const std::string& text, const std::string& command,
                       const std::vector<std::string>& overrides) {
  std::vector<Assignment> all = read_assignments(text);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(o, 0, "expected section.key=value");
    all.push_back(Assignment{trim(o.substr(0, eq)), trim(o.substr(eq + 1)), 0});
  }
  // Later assignments win, so --set overrides the file.
  std::vector<Assignment> resolved;
  for (const auto& a : all) {
    const auto it = std::find_if(resolved.begin(), resolved.end(), [&](const Assignment& r) { return r.key == a.key; });
    if (it != resolved.end()) {
      *it = a;
    } else {
      resolved.push_back(a);
    }
  }
  return build_config(resolved, command);
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("default"); };
  s << "command = " << command << '\n'
    << "geometry.ring_length = " << fmt(geometry.ring_length) << '\n'
    << "geometry.n_eff = " << fmt(geometry.n_eff) << '\n'
    << "geometry.n_g = " << fmt(geometry.n_g) << '\n'
    << "geometry.cross_coupling = " << fmt(geometry.cross_coupling) << '\n'
    << "geometry.alpha_loss = " << fmt(geometry.alpha_loss) << '\n'
    << "geometry.n2 = " << fmt(geometry.n2) << '\n'
    << "geometry.a_eff = " << fmt(geometry.a_eff) << '\n'
    << "geometry.lambda_p = " << fmt(geometry.lambda_p) << '\n'
    << "pump.power = " << opt(pump_power) << '\n'
    << "pump.sigma_n = " << opt(sigma_n) << '\n'
    << "pump.delta_p = " << fmt(delta_p) << '\n'
    << "pump.alpha_c = " << opt(alpha_c) << '\n'
    << "pump.coherent_power = " << opt(coherent_power) << '\n'
    << "sensor.phi = " << fmt(phi) << '\n'
    << "sensor.eta = " << fmt(eta) << '\n'
    << "sensor.sensor_length = " << opt(sensor_length) << '\n'
    << "sensor.charge_pump = " << (charge_pump ? "true" : "false") << '\n'
    << "squeezing.phi_lo = " << fmt(phi_lo) << '\n'
    << "improvement.decay_ratios =";
  for (double d : decay_ratios) s << ' ' << fmt(d);
  s << '\n'
    << "sweep.variable = " << sweep.variable << '\n'
    << "sweep.start = " << opt(sweep.start) << '\n'
    << "sweep.stop = " << opt(sweep.stop) << '\n'
    << "sweep.points = " << sweep.points << '\n'
    << "sweep.scale = " << (sweep.scale == Scale::Log ? "log" : "linear") << '\n';
  return s.str();
}

}  // namespace tmsi::cli
