// experiment.hpp — batch experiment orchestration: JSON config parsing,
// named presets, the four run modes (spectrum / emp / branches / compare),
// and deterministic CSV / JSON / SVG artifact emission.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "steklov/mps.hpp"

namespace steklov {

// Thrown for malformed or inconsistent configuration input (CLI exit code 2),
// as opposed to numerical failures (exit code 3).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { Spectrum, Emp, Branches, Compare };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& text);  // throws ConfigError

struct EigenSelector {
  int degree = 0;
  int branch = 1;  // 1 or (annulus only) 2

  friend bool operator==(const EigenSelector&, const EigenSelector&) = default;
};

struct ExperimentConfig {
  RunMode mode = RunMode::Spectrum;
  std::string label = "experiment";  // artifact basename: <label>_report.json...
  DomainSpec domain;
  int spectrum_count = 20;
  DeformationField field;
  std::vector<EigenSelector> targets;
  MpsConfig mps;
  double zero_tolerance = 1e-10;  // EMP zero / criticality tolerance
  bool tangents = true;           // draw first-order tangent lines in the SVG
  std::string out_dir;            // optional; the CLI --out-dir overrides it

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

// Parse and fully validate a JSON config document. Shorthand field strings
// are expanded to real-basis coefficient tables. Throws ConfigError with a
// field-path diagnostic on schema violations.
ExperimentConfig parse_config(const std::string& text);

// Serialize back to JSON such that parse_config(print_config(c)) == c.
std::string print_config(const ExperimentConfig& config);

// Override the run mode (CLI positional argument wins over the config file)
// and re-check the blocks the new mode requires.
void apply_mode(ExperimentConfig& config, RunMode mode);

// Expand a deformation shorthand into real-basis coefficients:
//   d = 2: "2cos(6theta)", "sin(5theta)-0.5", numeric constants
//   d = 3: "Y_{8,1}" (orthonormal real harmonic), numeric constants
// Terms may be combined with + and -; "theta" may be spelled with the Greek
// letter. Coefficients multiply the plain trig/harmonic function, not the
// orthonormal basis element.
CoeffMap parse_field_shorthand(const std::string& text, int dim);

// Embedded one-command experiment presets (fig3a, fig3b, fig4, fig5, fig6);
// configs/<name>.json carries the same document. preset_text throws
// ConfigError for unknown names.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

struct TargetReport {
  SteklovEigen eigen;
  EmpMatrix emp;
  Classification classification;
  bool volume_preserving_outer = true;
  bool volume_preserving_inner = true;
  std::vector<SlopeEstimate> slopes;  // compare mode only
  // Max over ascending-paired entries of |mps - emp| / max(1, |emp|);
  // computed separately for the right and left one-sided slopes.
  double residual_right = 0.0;
  double residual_left = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SteklovEigen> spectrum;  // first spectrum_count eigenvalues
  bool has_sweep = false;
  BranchSweep sweep;                    // branches / compare modes
  std::vector<TargetReport> targets;    // emp / compare modes
  std::vector<std::string> warnings;
};

// Dispatch one experiment. Library errors are propagated with the offending
// target prefixed to the message.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Artifact renderers (pure functions of the result; byte-deterministic).
std::string render_branch_csv(const BranchSweep& sweep);
std::string render_report_json(const ExperimentResult& result);
std::string render_plot_svg(const ExperimentResult& result);

// Write the mode's artifacts into out_dir (created if missing):
// <label>_report.json always; <label>_branches.csv and <label>_branches.svg
// when a sweep was run. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(
    const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace steklov
