#include "mortar/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mortar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

// "2x3, 4, 5x5" -> per sub-domain (nx, ny).
std::vector<std::array<int, 2>> parse_counts(const std::string& key, const std::string& v) {
  std::vector<std::array<int, 2>> out;
  for (const auto& item : split(v, ',')) {
    auto x = item.find('x');
    if (x == std::string::npos) {
      int n = to_int(key, item);
      out.push_back({n, n});
    } else {
      out.push_back({to_int(key, trim(item.substr(0, x))), to_int(key, trim(item.substr(x + 1)))});
    }
  }
  return out;
}

std::string counts_text(const std::vector<std::array<int, 2>>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ", ";
    s += c[i][0] == c[i][1] ? std::to_string(c[i][0]) : std::to_string(c[i][0]) + "x" + std::to_string(c[i][1]);
  }
  return s;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Cell text: fixed 17 significant digits, empty for missing values.
std::string cell(double v) { return std::isfinite(v) ? num(v) : ""; }

const char* to_string(Baseline b) { return b == Baseline::Auto ? "auto" : (b == Baseline::On ? "on" : "off"); }

bool wants_baseline(const ExperimentConfig& c) {
  return c.baseline == Baseline::On || (c.baseline == Baseline::Auto && c.preset == Preset::Exp1);
}

// Axis-aligned rectangle covered by the decomposition, if it is one.
Polygon screen_rectangle(const Decomposition& d) {
  Vec2 lo = d.subdomains[0][0], hi = lo;
  for (const auto& p : d.subdomains)
    for (const auto& v : p) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
  double box = (hi - lo).prod();
  if (std::abs(d.area() - box) > 1e-12 * box) return {};
  return {lo, Vec2(hi(0), lo(1)), hi, Vec2(lo(0), hi(1))};
}

}  // namespace

ExperimentConfig default_config(Preset p) {
  ExperimentConfig c;
  c.preset = p;
  c.schedule = default_schedule(p);
  for (int n = 4; n <= 24; n += 2) c.extrapolation_levels.push_back(n);
  switch (p) {
    case Preset::Exp1: c.steps = 6; break;
    case Preset::Exp2: c.steps = 8; break;
    case Preset::Exp3: c.steps = 6; break;
    case Preset::Exp4: c.steps = 12; break;
    case Preset::Custom: c.steps = 3; break;
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config(ExperimentConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "preset") {
      Preset p = parse_preset(value);
      if (p != c.preset) {
        ExperimentConfig d = default_config(p);
        d.decomposition_file = c.decomposition_file;
        d.out_dir = c.out_dir;
        c = d;
      }
    } else if (key == "decomposition") {
      c.decomposition_file = value;
    } else if (key == "steps") {
      c.steps = to_int(key, value);
    } else if (key == "initial") {
      c.schedule.initial = parse_counts(key, value);
    } else if (key == "increment") {
      c.schedule.increment = parse_counts(key, value);
    } else if (key == "grouping") {
      c.grouping = parse_grouping(value);
    } else if (key == "f") {
      c.f = to_double(key, value);
    } else if (key == "quad_accuracy") {
      c.quad.accuracy = to_double(key, value);
    } else if (key == "slobodeckij_accuracy") {
      c.quad.slobodeckij_accuracy = to_double(key, value);
    } else if (key == "solver") {
      if (value == "symmetric") c.solver = SolvePath::Symmetric;
      else if (value == "lu") c.solver = SolvePath::LU;
      else throw ConfigError("config: solver must be 'symmetric' or 'lu'");
    } else if (key == "extrapolation_levels") {
      c.extrapolation_levels.clear();
      for (const auto& s : split(value, ',')) c.extrapolation_levels.push_back(to_int(key, s));
    } else if (key == "energy_ex") {
      c.energy_ex = to_double(key, value);
    } else if (key == "baseline") {
      if (value == "auto") c.baseline = Baseline::Auto;
      else if (value == "on") c.baseline = Baseline::On;
      else if (value == "off") c.baseline = Baseline::Off;
      else throw ConfigError("config: baseline must be auto, on or off");
    } else if (key == "quasi_bound") {
      c.quasi_bound = to_double(key, value);
    } else if (key == "out_dir") {
      c.out_dir = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  } catch (const MeshError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void validate_config(const ExperimentConfig& c) {
  if (c.steps < 1) throw ConfigError("config: steps must be >= 1");
  if (c.schedule.initial.size() != c.schedule.increment.size())
    throw ConfigError("config: initial and increment list different numbers of sub-domains");
  for (std::size_t i = 0; i < c.schedule.initial.size(); ++i)
    for (int k = 0; k < 2; ++k) {
      if (c.schedule.initial[i][k] < 1) throw ConfigError("config: initial slide counts must be >= 1");
      if (c.schedule.increment[i][k] < 0) throw ConfigError("config: increments must be >= 0");
    }
  if (!(c.quad.accuracy > 0 && c.quad.accuracy < 1) || !(c.quad.slobodeckij_accuracy > 0))
    throw ConfigError("config: quadrature accuracy must lie in (0, 1)");
  if (c.energy_ex <= 0 && c.extrapolation_levels.size() < 3)
    throw ConfigError("config: extrapolation needs at least 3 levels");
  for (int n : c.extrapolation_levels)
    if (n < 2) throw ConfigError("config: extrapolation levels must be >= 2");
  if (c.preset == Preset::Custom && c.decomposition_file.empty())
    throw ConfigError("config: the custom preset needs 'decomposition = <file>'");
  if (!(c.quasi_bound >= 1)) throw ConfigError("config: quasi_bound must be >= 1");
}

std::string config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "preset = " << to_string(c.preset) << '\n';
  if (!c.decomposition_file.empty()) os << "decomposition = " << c.decomposition_file << '\n';
  os << "steps = " << c.steps << '\n';
  os << "initial = " << counts_text(c.schedule.initial) << '\n';
  os << "increment = " << counts_text(c.schedule.increment) << '\n';
  os << "grouping = " << to_string(c.grouping) << '\n';
  os << "f = " << num(c.f) << '\n';
  os << "quad_accuracy = " << num(c.quad.accuracy) << '\n';
  os << "slobodeckij_accuracy = " << num(c.quad.slobodeckij_accuracy) << '\n';
  os << "solver = " << to_string(c.solver) << '\n';
  os << "extrapolation_levels = ";
  for (std::size_t i = 0; i < c.extrapolation_levels.size(); ++i) os << (i ? ", " : "") << c.extrapolation_levels[i];
  os << '\n';
  if (c.energy_ex > 0) os << "energy_ex = " << num(c.energy_ex) << '\n';
  os << "baseline = " << to_string(c.baseline) << '\n';
  os << "quasi_bound = " << num(c.quasi_bound) << '\n';
  return os.str();
}

Decomposition experiment_decomposition(const ExperimentConfig& c) {
  if (c.preset == Preset::Custom) return load_decomposition(c.decomposition_file);
  return build_decomposition(c.preset, c.schedule);
}

StepDiscretization discretize(const Decomposition& d, const SlideSchedule& s, int step, Grouping g,
                              double quasi_bound) {
  if (s.size() != d.size())
    throw MeshError("schedule lists " + std::to_string(s.size()) + " sub-domains, decomposition has " +
                    std::to_string(d.size()));
  std::vector<SubdomainMesh> meshes;
  for (int i = 0; i < d.size(); ++i) {
    auto n = s.slides(i, step);
    meshes.push_back(build_subdomain_mesh(d, i, n[0], n[1]));
  }
  XSpace X = build_x_space(d, std::move(meshes));
  MSpace M = build_m_space(X, g);
  ValidationReport r = validate_decomposition(d, X.meshes(), M.partitions, quasi_bound);
  if (!r.ok()) {
    std::string why;
    for (const auto& i : r.issues) why += (why.empty() ? "" : "; ") + i;
    throw MeshError("validation failed: " + why);
  }
  return {std::move(X), std::move(M), std::move(r)};
}

namespace {

double conforming_energy(const Polygon& screen, int n, const ExperimentConfig& c, std::map<int, double>& cache) {
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Decomposition one = make_decomposition("conforming", {screen});
  std::vector<SubdomainMesh> m = {build_subdomain_mesh(one, 0, n, n)};
  XSpace X = build_x_space(one, std::move(m));
  double e = solve_conforming(X, c.quad, c.f).energy;
  cache[n] = e;
  return e;
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& c, const std::function<void(const ErrorRecord&)>& on_record) {
  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    throw StageError("config", 0, e.what());
  }
  RunManifest man;
  man.config = c;
  auto t_setup = Clock::now();
  Decomposition d;
  try {
    d = experiment_decomposition(c);
  } catch (const std::exception& e) {
    throw StageError("mesh", 0, e.what());
  }
  const bool baseline = wants_baseline(c);
  Polygon screen = screen_rectangle(d);
  std::map<int, double> energies;
  if (c.energy_ex > 0) {
    man.extrapolation.energy = c.energy_ex;
  } else {
    if (screen.empty()) throw StageError("extrapolation", 0, "the screen is not a rectangle; set energy_ex");
    try {
      std::vector<double> E, h;
      for (int n : c.extrapolation_levels) {
        E.push_back(conforming_energy(screen, n, c, energies));
        h.push_back(std::max(screen[2](0) - screen[0](0), screen[2](1) - screen[0](1)) / n);
      }
      man.extrapolation = extrapolate_energy(E, h);
    } catch (const std::exception& e) {
      throw StageError("extrapolation", 0, e.what());
    }
  }
  man.setup_seconds = seconds_since(t_setup);

  for (int step = 1; step <= c.steps; ++step) {
    StageTimes t;
    auto t0 = Clock::now();
    StepDiscretization D;
    try {
      D = discretize(d, c.schedule, step, c.grouping, c.quasi_bound);
    } catch (const std::exception& e) {
      throw StageError("mesh", step, e.what());
    }
    t.mesh = seconds_since(t0);
    auto t1 = Clock::now();
    SaddleSystem S;
    try {
      S = assemble_system(D.X, D.M, c.quad, c.f);
    } catch (const std::exception& e) {
      throw StageError("assembly", step, e.what());
    }
    t.assembly = seconds_since(t1);
    auto t2 = Clock::now();
    MortarSolution sol;
    try {
      sol = solve_saddle(S, c.solver);
      if (!(sol.residual_a <= 1e-10 && sol.residual_b <= 1e-10))
        throw SolverError("residuals above 1e-10 (" + num(sol.residual_a) + ", " + num(sol.residual_b) + ")");
    } catch (const std::exception& e) {
      throw StageError("solve", step, e.what());
    }
    t.solve = seconds_since(t2);
    auto t3 = Clock::now();
    ErrorRecord r;
    try {
      double conf = kNoValue;
      if (baseline) {
        auto n0 = c.schedule.slides(0, step);
        for (int i = 0; i < d.size(); ++i)
          if (c.schedule.slides(i, step) != n0 || n0[0] != n0[1])
            throw AnalysisError("conforming baseline needs equal square slide counts on all sub-domains");
        if (screen.empty() || d.size() != 4) throw AnalysisError("conforming baseline needs a quadrant split");
        conf = conforming_energy(screen, 2 * n0[0], c, energies);
      }
      r = error_curves(S.F.dot(sol.u), jump_l2_norm(D.X, sol.u), man.extrapolation.energy, conf);
    } catch (const std::exception& e) {
      throw StageError("analysis", step, e.what());
    }
    r.step = step;
    r.h = S.h;
    r.k = S.k;
    r.h_min = S.h_min;
    r.dim_x = S.dim_x;
    r.dim_m = S.dim_m;
    t.analysis = seconds_since(t3);
    std::vector<double> hs;
    for (const auto& m : D.X.meshes()) hs.push_back(m.h);
    man.subdomain_h.push_back(hs);
    man.records.push_back(r);
    man.times.push_back(t);
    if (on_record) on_record(r);
  }
  // Values at machine-zero level (e.g. the jump on matching meshes) carry no rate.
  for (const char* name : {"curve1", "curve2", "curve3", "curve4"}) {
    std::vector<double> h, v;
    for (const auto& r : man.records) {
      double x = curve_value(r, parse_curve(name));
      if (std::isfinite(x) && x > 1e-6) h.push_back(r.h), v.push_back(x);
    }
    if (h.size() >= 3) man.slopes[name] = fit_slope(h, v);
  }
  return man;
}

std::string csv_header() { return "step,h,k,hmin,dimX,dimM,F_uh,jumpL2,curve1,curve2,curve3,curve4"; }

std::string csv_row(const ErrorRecord& r) {
  std::string s = std::to_string(r.step);
  for (double v : {r.h, r.k, r.h_min}) s += "," + cell(v);
  s += "," + std::to_string(r.dim_x) + "," + std::to_string(r.dim_m);
  for (double v : {r.F_uh, r.jump_l2, r.curve1, r.curve2, r.curve3, r.curve4}) s += "," + cell(v);
  return s;
}

std::vector<double> reference_line(const std::vector<ErrorRecord>& records) {
  std::vector<double> out;
  if (records.empty()) return out;
  const double C = records[0].curve1 / std::sqrt(records[0].h);
  for (const auto& r : records) out.push_back(C * std::sqrt(r.h));
  return out;
}

std::string plot_script() {
  return R"PY(#!/usr/bin/env python3
# Error curves versus 1/h on double logarithmic scales, from results.csv.
import csv
import math
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "results.csv")
rows = list(csv.DictReader(open(path)))
inv_h = [1.0 / float(r["h"]) for r in rows]

fig, ax = plt.subplots(figsize=(6, 4.5))
labels = {"curve1": "mortar BEM", "curve2": "error1", "curve3": "error2", "curve4": "conforming BEM"}
markers = {"curve1": "o-", "curve2": "s--", "curve3": "^--", "curve4": "d-"}
for key, label in labels.items():
    pts = [(x, float(r[key])) for x, r in zip(inv_h, rows) if r[key] != "" and float(r[key]) > 0]
    if pts:
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], markers[key], label=label)
c = float(rows[0]["curve1"]) * math.sqrt(inv_h[0])
ax.loglog(inv_h, [c / math.sqrt(x) for x in inv_h], "k:", label="h^1/2")
ax.set_xlabel("1/h")
ax.set_ylabel("relative error")
ax.legend()
ax.grid(True, which="both", alpha=0.3)
fig.tight_layout()
out = os.path.join(os.path.dirname(os.path.abspath(path)), "errors.png")
fig.savefig(out, dpi=150)
print(out)
)PY";
}

void emit_outputs(const RunManifest& m, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("cannot write '" + (fs::path(dir) / name).string() + "'");
    return f;
  };
  {
    auto f = open("results.csv");
    f << csv_header() << '\n';
    for (const auto& r : m.records) f << csv_row(r) << '\n';
  }
  {
    auto f = open("plot.py");
    f << plot_script();
    fs::permissions(fs::path(dir) / "plot.py", fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                    fs::perm_options::add, ec);
  }
  nlohmann::ordered_json j;
  j["config"] = config_text(m.config);
  nlohmann::ordered_json ex;
  ex["energy"] = m.extrapolation.energy;
  ex["C"] = m.extrapolation.C;
  ex["rate"] = m.extrapolation.rate;
  ex["residual"] = m.extrapolation.residual;
  ex["h"] = m.extrapolation.h;
  ex["energies"] = m.extrapolation.energies;
  j["extrapolation"] = ex;
  auto ref = reference_line(m.records);
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& r = m.records[i];
    nlohmann::ordered_json o;
    o["step"] = r.step;
    o["h"] = r.h;
    o["k"] = r.k;
    o["hmin"] = r.h_min;
    o["h_subdomains"] = m.subdomain_h[i];
    o["dimX"] = r.dim_x;
    o["dimM"] = r.dim_m;
    o["F_uh"] = r.F_uh;
    o["jumpL2"] = r.jump_l2;
    o["curve1"] = r.curve1;
    o["curve2"] = r.curve2;
    o["curve3"] = r.curve3;
    o["curve4"] = std::isfinite(r.curve4) ? nlohmann::ordered_json(r.curve4) : nlohmann::ordered_json(nullptr);
    o["reference"] = ref[i];
    const auto& t = m.times[i];
    o["seconds"] = {{"mesh", t.mesh}, {"assembly", t.assembly}, {"solve", t.solve}, {"analysis", t.analysis}};
    recs.push_back(o);
  }
  j["records"] = recs;
  j["slopes"] = m.slopes;
  j["setup_seconds"] = m.setup_seconds;
  auto f = open("manifest.json");
  f << j.dump(2) << '\n';
}

}  // namespace mortar
