#ifndef BIFI_CONFIG_HPP
#define BIFI_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "experiments.hpp"

namespace bifi {

// Custom setup mirroring TestPreset, populated from the [custom] section.
struct CustomPresetConfig {
  int dimension = 5;
  std::string sigma_kind = "fourier-cosine";  // fourier-sine|piecewise-fourier|constant
  double sigma_base = 1.0;
  double sigma_amp = 4.0;
  double sigma_break = 0.5;
  double sigma_right = 0.2;
  std::string epsilon_kind = "constant";  // constant|tanh
  double epsilon_value = 1e-8;
  std::string initial = "zero";  // zero|double-gaussian|riemann-step|gaussian-pulse
  double pulse_xi = 0.01;
  double step_left_const = 1.0;
  double step_left_z1 = 0.4;
  std::string boundary = "periodic";  // periodic|inflow
  double inflow_left_const = 1.0;
  double inflow_left_z1 = 0.0;
  double inflow_right_const = 0.0;
  double inflow_right_z1 = 0.0;
  double t_final = 0.01;
  int hf_cells = 40;
  double hf_dt = 1e-4;
  int lf_cells = 40;
  double lf_dt = 2e-4;
};

// Raw run configuration; -1 / "preset" entries mean "use the preset default".
struct RunConfig {
  std::string command = "run-test";
  std::string preset = "1";  // "1".."5" or "custom"
  std::string epsilon = "preset";
  std::vector<double> z;  // empty = origin
  std::string out_dir = "report";
  int workers = 0;  // 0 = all available cores
  std::uint64_t seed = 7777;

  int n = -1;
  std::string n_list = "none";
  int candidates = -1;
  int validation = -1;
  double tol = 1e-8;
  std::uint64_t validation_seed = 7778;

  double lf_sigma_scale = 3.0;
  int sparse_level = 5;
  int velocity_nodes = 16;
  double bound_c1 = 1.0;
  double bound_c2 = 1.0;

  CustomPresetConfig custom;
};

// Strict parser: unknown sections or keys, malformed values and out-of-range
// numbers all raise ConfigError naming the key and line.
RunConfig parse_config_text(const std::string& text, const std::string& source);
RunConfig parse_config(const std::string& path);

// Applies one "section.key" override with the same validation as the parser.
void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

// Canonical text form: every key in a fixed order with resolved values.
// Parsing the rendered text reproduces an equivalent configuration.
std::string render_canonical(const RunConfig& cfg);

struct ResolvedRun {
  std::string command;
  TestPreset preset;
  PipelineOptions opts;
  ParamVector z;
  std::string out_dir;
  std::vector<int> n_list;
};

// Folds preset defaults and overrides into a runnable description.
ResolvedRun resolve(const RunConfig& cfg);

}  // namespace bifi

#endif  // BIFI_CONFIG_HPP
