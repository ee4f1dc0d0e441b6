#pragma once

#include "mortar/analysis.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mortar {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure inside a run, tagged with the pipeline stage and step (0 = setup).
struct StageError : std::runtime_error {
  std::string stage;
  int step;
  StageError(std::string s, int k, const std::string& cause)
      : std::runtime_error(s + " (step " + std::to_string(k) + "): " + cause), stage(std::move(s)), step(k) {}
};

enum class Baseline { Auto, On, Off };

struct ExperimentConfig {
  Preset preset = Preset::Exp1;
  std::string decomposition_file;  // custom preset
  int steps = 4;
  SlideSchedule schedule;
  Grouping grouping = Grouping::Pairs;
  double f = 1.0;
  AssemblyOptions quad;
  SolvePath solver = SolvePath::Symmetric;
  std::vector<int> extrapolation_levels;  // conforming n x n meshes of the whole screen
  double energy_ex = 0;                   // > 0 skips the extrapolation
  Baseline baseline = Baseline::Auto;     // auto: exp1 only
  double quasi_bound = 4.0;
  std::string out_dir = "out";
};

ExperimentConfig default_config(Preset p);
// key = value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);
void apply_config(ExperimentConfig& c, const std::string& key, const std::string& value);
void validate_config(const ExperimentConfig& c);
// Re-runnable key = value echo.
std::string config_text(const ExperimentConfig& c);

Decomposition experiment_decomposition(const ExperimentConfig& c);

struct StepDiscretization {
  XSpace X;
  MSpace M;
  ValidationReport report;
};

StepDiscretization discretize(const Decomposition& d, const SlideSchedule& s, int step, Grouping g,
                              double quasi_bound = 4.0);

struct StageTimes {
  double mesh = 0, spaces = 0, assembly = 0, solve = 0, analysis = 0;
};

struct RunManifest {
  ExperimentConfig config;
  ExtrapolationResult extrapolation;
  std::vector<ErrorRecord> records;
  std::vector<std::vector<double>> subdomain_h;  // h_i per step
  std::vector<StageTimes> times;
  std::map<std::string, double> slopes;          // curve name -> slope vs 1/h
  double setup_seconds = 0;
};

RunManifest run_experiment(const ExperimentConfig& c, const std::function<void(const ErrorRecord&)>& on_record = {});

std::string csv_header();
std::string csv_row(const ErrorRecord& r);
// C h^{1/2} with C fixed by the first record's curve1.
std::vector<double> reference_line(const std::vector<ErrorRecord>& records);
std::string plot_script();

// results.csv, manifest.json and plot.py in `dir`.
void emit_outputs(const RunManifest& m, const std::string& dir);

}  // namespace mortar
