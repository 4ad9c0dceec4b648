#pragma once

// Batch front end: flat `section.key = value` configuration, per-command grid
// evaluation and CSV output.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmsi/params.hpp"

namespace tmsi::cli {

/// Bad configuration: unknown or missing key, malformed or out-of-range value,
/// conflicting keys. `line` is 0 for --set overrides and -1 when no single
/// line is responsible.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scale { Linear, Log };

struct Sweep {
  std::string variable;
  std::optional<double> start;
  std::optional<double> stop;
  int points = 0;  ///< 0 selects the command default
  Scale scale = Scale::Linear;
};

struct RunConfig {
  std::string command;
  std::string output;

  RingGeometry geometry = RingGeometry::reference();

  // pump
  std::optional<double> pump_power;      ///< W
  std::optional<double> sigma_n;
  double delta_p = 0.0;
  std::optional<double> alpha_c;         ///< √Hz
  std::optional<double> coherent_power;  ///< W

  // sensor
  double phi = 1.5707963267948966;
  double eta = 1.0;
  std::optional<double> sensor_length;   ///< m, overrides eta
  bool charge_pump = true;

  double phi_lo = 1.5707963267948966;    ///< squeezing.phi_lo
  std::vector<double> decay_ratios;      ///< improvement.decay_ratios

  Sweep sweep;

  /// Canonical `key = value` text of every resolved field.
  std::string canonical() const;
};

/// Key/value pairs in the order they were given, with source line numbers.
struct Assignment {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<Assignment> read_assignments(const std::string& text);
RunConfig parse_config(const std::string& text, const std::string& command = "rates",
                       const std::vector<std::string>& overrides = {});
RunConfig build_config(const std::vector<Assignment>& assignments, const std::string& command);

const std::vector<std::string>& command_names();

struct Row {
  std::vector<double> values;
  std::string flag;
};

struct ResultTable {
  std::vector<std::string> columns;  ///< numeric columns; a trailing `flag` column is always written
  std::vector<Row> rows;
  std::map<std::string, std::string> metadata;
};

ResultTable run_command(const RunConfig& cfg);

std::string sha256_hex(const std::string& data);
std::string format_number(double v);
void write_table(const ResultTable& table, std::ostream& out);
void write_table(const ResultTable& table, const std::string& path);

/// Full program: returns the process exit code (0 ok, 2 config error, 3 I/O error).
int run_main(const std::string& command, const std::optional<std::string>& config_path,
             const std::optional<std::string>& out_path, const std::vector<std::string>& overrides,
             std::ostream& out, std::ostream& err);

}  // namespace tmsi::cli
