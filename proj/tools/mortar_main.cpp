// Batch runner: preset defaults, then the config file, then flags.
#include "mortar/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Mortar boundary element convergence runs for the hypersingular screen problem"};
  std::string preset, config_file, out_dir, grouping, quad;
  int steps = 0;
  bool quiet = false;
  app.add_option("--preset", preset, "exp1 | exp2 | exp3 | exp4 | custom");
  app.add_option("--steps", steps, "number of refinement steps (>= 1)");
  app.add_option("--out-dir", out_dir, "directory for results.csv, manifest.json, plot.py");
  app.add_option("--quad-accuracy", quad, "relative accuracy of the single-layer pair integrals");
  app.add_option("--grouping", grouping, "multiplier grouping: pairs | whole | identity");
  app.add_option("--config", config_file, "key = value config file");
  app.add_flag("-q,--quiet", quiet, "no per-step progress on stderr");
  CLI11_PARSE(app, argc, argv);

  using namespace mortar;
  ExperimentConfig c;
  try {
    std::vector<std::pair<std::string, std::string>> kv;
    if (!config_file.empty()) kv = read_config_file(config_file);
    // The preset decides the defaults the remaining keys override.
    Preset p = Preset::Exp1;
    for (const auto& [k, v] : kv)
      if (k == "preset") p = parse_preset(v);
    if (!preset.empty()) p = parse_preset(preset);
    c = default_config(p);
    for (const auto& [k, v] : kv)
      if (k != "preset") apply_config(c, k, v);
    if (app.count("--steps")) apply_config(c, "steps", std::to_string(steps));
    if (!out_dir.empty()) c.out_dir = out_dir;
    if (!quad.empty()) apply_config(c, "quad_accuracy", quad);
    if (!grouping.empty()) apply_config(c, "grouping", grouping);
    validate_config(c);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config (step 0): %s\n", e.what());
    return 2;
  }

  // Rows are written as they arrive so a failed run leaves the finished steps.
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  const std::string csv_path = (std::filesystem::path(c.out_dir) / "results.csv").string();
  std::ofstream csv(csv_path);
  if (!csv) {
    std::fprintf(stderr, "output (step 0): cannot write '%s'\n", csv_path.c_str());
    return 3;
  }
  csv << csv_header() << '\n' << std::flush;
  auto progress = [&](const ErrorRecord& r) {
    csv << csv_row(r) << '\n' << std::flush;
    if (!quiet)
      std::fprintf(stderr, "step %d  dimX %d  dimM %d  h %.4f  curve1 %.4e  jump %.2e\n", r.step, r.dim_x, r.dim_m,
                   r.h, r.curve1, r.jump_l2);
  };
  try {
    RunManifest m = run_experiment(c, progress);
    csv.close();
    emit_outputs(m, c.out_dir);
    for (const auto& [name, s] : m.slopes) std::fprintf(stderr, "slope %s %.4f\n", name.c_str(), s);
    std::printf("%s\n", c.out_dir.c_str());
  } catch (const StageError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "output (step 0): %s\n", e.what());
    return 3;
  }
  return 0;
}
