#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmsi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light microring and interferometer model", "tmsi"};
  app.set_version_flag("--version", TMSI_VERSION);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;

  for (const auto& name : tmsi::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file (section.key = value)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "CSV output path, '-' for stdout");
    sub->add_option("--set", overrides, "override as section.key=value (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return tmsi::cli::run_main(command, config_path.empty() ? std::nullopt : std::optional(config_path),
                             out_path.empty() ? std::nullopt : std::optional(out_path), overrides, std::cout,
                             std::cerr);
}
