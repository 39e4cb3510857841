#ifndef BIFI_EXPERIMENTS_HPP
#define BIFI_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bifidelity.hpp"
#include "quadrature.hpp"
#include "solvers.hpp"

namespace bifi {

// One benchmark setup: fields, initial/boundary data, discretizations and
// surrogate sizes. benchmark_preset(1..5) are the built-in configurations.
struct TestPreset {
  int id = 0;  // 0 for custom setups
  int dimension = 5;
  ScatteringField sigma;
  EpsilonField eps;
  InitialData initial;
  BoundarySpec boundary;
  double t_final = 0.01;
  int hf_cells = 40;
  double hf_dt = 1e-4;
  int lf_cells = 40;
  double lf_dt = 2e-4;
  int n_select = 12;
  int n_candidates = 1000;
  int n_validation = 200;
  double lf_sigma_scale = 3.0;
  int velocity_nodes = 16;

  SolverConfig hf_config() const;
  SolverConfig lf_config() const;
};

TestPreset benchmark_preset(int id);

// e = sqrt(dx * sum (a_i - r_i)^2) for the mean and std profiles.
struct L2Pair {
  double e_mean = 0.0;
  double e_std = 0.0;
};
L2Pair l2_metrics(const std::vector<double>& approx_mean, const std::vector<double>& approx_std,
                  const std::vector<double>& ref_mean, const std::vector<double>& ref_std,
                  double dx);

struct StatProfiles {
  std::vector<double> mean;
  std::vector<double> std_dev;
};

// Sparse-grid collocation statistics of the HF quantity of interest. Weights
// are rescaled from total measure 2^d to a probability measure; solves may run
// in parallel but are reduced in node order.
StatProfiles reference_statistics(const TestPreset& preset, const SparseGrid& grid,
                                  int workers = 0);

struct ConvergenceRow {
  int n = 0;
  double e_mean = kInf;
  double e_std = kInf;
  double bound = kInf;
  double re = kInf;
};

struct PipelineOptions {
  std::uint64_t seed = 7777;
  std::uint64_t validation_seed = 7778;
  double selection_tol = 1e-8;
  double bound_c1 = 1.0;
  double bound_c2 = 1.0;
  int sparse_level = 5;
  int workers = 0;
  bool with_validation = true;
  bool with_reference = true;
};

struct ExperimentReport {
  // profiles on the HF grid
  std::vector<double> x;
  std::vector<double> mean_bf, std_bf, mean_ref, std_ref;
  double e_mean = kInf, e_std = kInf;                        // at n_used
  double lf_baseline_e_mean = kInf, lf_baseline_e_std = kInf;
  std::vector<ConvergenceRow> convergence;    // k = 1..n_used
  std::vector<DiagnosticsRow> diagnostics;    // k = 1..(selection size - 1)
  std::vector<int> selected;                  // candidate indices, selection order
  std::vector<double> pivots;
  int n_used = 0;
  bool hf_gramian_jitter = false;
  std::size_t sparse_nodes = 0;
  double hf_stability_usage = 0.0, lf_stability_usage = 0.0;
  // wall-clock seconds per phase
  double t_candidates = 0.0, t_selection = 0.0, t_hf_snapshots = 0.0, t_reference = 0.0,
         t_bifidelity = 0.0, t_validation = 0.0;
};

// Full pipeline: candidate LF sweep, greedy selection, HF snapshots,
// bi-fidelity statistics against the sparse-grid reference, validation
// diagnostics.
ExperimentReport run_test(const TestPreset& preset, const PipelineOptions& opts);

// Reuses one selection pass and truncates the surrogate at each requested n.
std::vector<ConvergenceRow> convergence_sweep(const TestPreset& preset,
                                              const std::vector<int>& n_list,
                                              const PipelineOptions& opts);

// Report directory artifacts. config_echo is written verbatim to config.echo.
void write_report(const ExperimentReport& rep, const std::string& dir,
                  const std::string& config_echo);

// 17-significant-digit formatting used by every CSV writer ("inf" for
// sentinels).
std::string fmt17(double v);

// Piecewise-linear resampling of LF-grid cell values onto the HF grid
// (baseline diagnostics only; the surrogate itself never interpolates).
std::vector<double> resample_linear(const std::vector<double>& values, double src_dx,
                                    int dst_cells, double dst_dx);

}  // namespace bifi

#endif  // BIFI_EXPERIMENTS_HPP
