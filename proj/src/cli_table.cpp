#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "tmsi/cli.hpp"
#include "tmsi/errors.hpp"

#ifndef TMSI_VERSION
#define TMSI_VERSION "0.0.0"
#endif

namespace tmsi::cli {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0f]);
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

void write_table(const ResultTable& table, std::ostream& out) {
  out << "# tool_version=" << TMSI_VERSION << '\n';
  for (const auto& [key, value] : table.metadata) out << "# " << key << '=' << value << '\n';
  for (const auto& c : table.columns) out << c << ',';
  out << "flag\n";
  for (const auto& row : table.rows) {
    for (double v : row.values) out << format_number(v) << ',';
    out << row.flag << '\n';
  }
}

void write_table(const ResultTable& table, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write_table(table, static_cast<std::ostream&>(file));
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

int run_main(const std::string& command, const std::optional<std::string>& config_path,
             const std::optional<std::string>& out_path, const std::vector<std::string>& overrides,
             std::ostream& out, std::ostream& err) {
  try {
    std::string text;
    if (config_path) {
      std::ifstream in(*config_path, std::ios::binary);
      if (!in) throw IoError("cannot read config '" + *config_path + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    RunConfig cfg = parse_config(text, command, overrides);
    if (out_path) cfg.output = *out_path;
    ResultTable table;
    try {
      table = run_command(cfg);
    } catch (const DomainError& e) {
      throw ConfigError("", -1, e.what());
    }
    if (cfg.output.empty() || cfg.output == "-")
      write_table(table, out);
    else
      write_table(table, cfg.output);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace tmsi::cli
