// Command-line driver: load a configuration (file or named preset), run the
// requested experiment mode, and write the report/CSV/SVG artifacts.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "steklov/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream)
    throw steklov::ConfigError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

std::string preset_help() {
  std::string names;
  for (const std::string& name : steklov::preset_names()) {
    if (!names.empty()) names += ", ";
    names += name;
  }
  return "Built-in configuration (" + names + ")";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steklov spectra of balls and annuli: exact eigenvalues, "
               "perturbation matrices, and collocation eigenvalue branches"};
  app.require_subcommand(0);

  std::string mode_name;
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  app.add_option("mode", mode_name,
                 "Run mode: spectrum, emp, branches, or compare")
      ->required();
  CLI::Option* config_opt =
      app.add_option("--config", config_path, "Path to a JSON config file");
  CLI::Option* preset_opt =
      app.add_option("--preset", preset_name, preset_help());
  config_opt->excludes(preset_opt);
  preset_opt->excludes(config_opt);
  app.add_option("--out-dir", out_dir,
                 "Output directory (default: config's out_dir, else \".\")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (config_path.empty() && preset_name.empty())
      throw steklov::ConfigError("one of --config or --preset is required");

    const std::string text = config_path.empty()
                                 ? steklov::preset_text(preset_name)
                                 : read_file(config_path);
    steklov::ExperimentConfig config = steklov::parse_config(text);
    steklov::apply_mode(config, steklov::run_mode_from_string(mode_name));

    const steklov::ExperimentResult result = steklov::run_experiment(config);
    for (const std::string& warning : result.warnings)
      std::cerr << "warning: " << warning << "\n";

    std::filesystem::path dir = ".";
    if (!config.out_dir.empty()) dir = config.out_dir;
    if (!out_dir.empty()) dir = out_dir;
    for (const auto& path : steklov::write_outputs(result, dir))
      std::cout << "wrote " << path.string() << "\n";

    for (const steklov::TargetReport& report : result.targets) {
      std::printf("target degree %d branch %d: eigenvalue %.12g, %s",
                  report.eigen.degree, report.eigen.branch,
                  report.eigen.value, report.classification.label());
      if (!report.slopes.empty())
        std::printf(", slope residual right %.3g left %.3g",
                    report.residual_right, report.residual_left);
      std::printf("\n");
    }
    return 0;
  } catch (const steklov::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
