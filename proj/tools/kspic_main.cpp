// kspic <mode> [--config FILE] [--key=value ...]
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "kspic/config.hpp"
#include "kspic/error.hpp"
#include "kspic/experiments.hpp"

namespace {

std::string modes_text() {
  return "modes: hybrid nbody atom-ode radial-probe radius-law critical-mass-sweep merger-compare hybrid-vs-nbody";
}

std::string keys_text() {
  std::string out = "keys (as --key=value or key=value lines in the config file):\n";
  for (const auto& [k, help] : kspic::config_key_help()) out += "  " + k + "  " + help + "\n";
  out += "presets:";
  for (const auto& p : kspic::preset_names()) out += " " + p;
  return out + "\n";
}

kspic::KeyValues parse_overrides(const std::vector<std::string>& extras) {
  kspic::KeyValues out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw kspic::ConfigError(arg, "expected --key=value");
    arg.erase(0, 2);
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
    } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
      out.emplace_back(arg, extras[++i]);
    } else {
      throw kspic::ConfigError(arg, "missing value");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle-grid simulator for Keller-Segel chemotaxis"};
  app.allow_extras();
  app.footer(modes_text() + "\n" + keys_text());
  std::string mode_text;
  std::string config_path;
  bool quiet = false;
  app.add_option("mode", mode_text, "experiment mode")->required();
  app.add_option("--config", config_path, "flat key=value config file");
  app.add_flag("-q,--quiet", quiet, "do not echo the summary");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto mode = kspic::parse_mode(mode_text);
    const auto file_values = config_path.empty() ? kspic::KeyValues{} : kspic::read_config_file(config_path);
    const auto cfg = kspic::parse_config(mode, file_values, parse_overrides(app.remaining()));
    const auto summary = kspic::run_experiment(cfg);
    if (!quiet) std::cout << summary.text();
    return 0;
  } catch (const kspic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
}
