#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "errors.hpp"
#include "thread_pool.hpp"

namespace bifi {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Rethrows solver failures with a phase tag (and node index for sweeps),
// preserving the error type so callers can still map it to an exit code.
template <typename Fn>
auto tagged(const std::string& phase, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DivergedError& e) {
    throw DivergedError(phase + ": " + e.what(), e.step());
  } catch (const ArgumentError& e) {
    throw ArgumentError(phase + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(phase + ": " + e.what());
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kInf;
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return (v.size() % 2 == 1) ? v[h] : 0.5 * (v[h - 1] + v[h]);
}


// Weighted mean/std profiles over per-node columns; the centered second pass
// avoids the raw-moment cancellation (weights from sparse combinations
// alternate in sign), keeping deterministic setups at round-off zero.
void weighted_stats(const std::vector<std::vector<double>>& cols,
                    const std::vector<double>& w, std::vector<double>& mean,
                    std::vector<double>& stddev) {
  std::size_t n = cols.front().size();
  mean.assign(n, 0.0);
  stddev.assign(n, 0.0);
  for (std::size_t q = 0; q < cols.size(); ++q)
    for (std::size_t i = 0; i < n; ++i) mean[i] += w[q] * cols[q][i];
  for (std::size_t q = 0; q < cols.size(); ++q)
    for (std::size_t i = 0; i < n; ++i) {
      double d = cols[q][i] - mean[i];
      stddev[i] += w[q] * d * d;
    }
  for (std::size_t i = 0; i < n; ++i) stddev[i] = std::sqrt(std::max(0.0, stddev[i]));
}

}  // namespace

SolverConfig TestPreset::hf_config() const {
  SolverConfig cfg;
  cfg.grid = SpatialGrid::uniform(hf_cells, boundary);
  cfg.dt = hf_dt;
  cfg.t_final = t_final;
  cfg.eps = eps;
  cfg.sigma = sigma;
  cfg.vq = gauss_legendre_unit(velocity_nodes);
  return cfg;
}

SolverConfig TestPreset::lf_config() const {
  SolverConfig cfg;
  cfg.grid = SpatialGrid::uniform(lf_cells, boundary);
  cfg.dt = lf_dt;
  cfg.t_final = t_final;
  cfg.eps = eps;
  cfg.sigma = sigma;
  cfg.vq = gauss_legendre_unit(velocity_nodes);
  cfg.lf_sigma_scale = lf_sigma_scale;
  return cfg;
}

TestPreset benchmark_preset(int id) {
  TestPreset p;
  p.id = id;
  p.dimension = 5;
  switch (id) {
    case 1:
      p.sigma = ScatteringField::fourier_cosine(1.0, 4.0, 5);
      p.eps = EpsilonField::constant(1e-8);
      p.initial = InitialData::zero();
      p.boundary = BoundarySpec::inflow({1.0, {}}, {0.0, {}});
      p.t_final = 0.01;
      p.hf_cells = 40;
      p.hf_dt = 2.0e-4 / 3.0;
      p.lf_cells = 40;
      p.lf_dt = 2e-4;
      p.n_select = 12;
      break;
    case 2:
      p.sigma = ScatteringField::fourier_cosine(1.0, 4.0, 5);
      p.eps = EpsilonField::constant(1e-2);
      p.initial = InitialData::double_gaussian(ScatteringField::fourier_sine(1.0, 3.0, 5),
                                               ScatteringField::fourier_cosine(1.0, 2.0, 5));
      p.boundary = BoundarySpec::periodic();
      p.t_final = 0.02;
      p.hf_cells = 40;
      p.hf_dt = 1e-4;
      p.lf_cells = 25;
      p.lf_dt = 2e-4;
      p.n_select = 12;
      break;
    case 3:
      p.sigma = ScatteringField::fourier_cosine(1.0, 4.0, 5);
      p.eps = EpsilonField::constant(1e-8);
      p.initial = InitialData::riemann_step({1.0, {0.4}});
      p.boundary = BoundarySpec::inflow({1.0, {0.4}}, {0.0, {}});
      p.t_final = 0.01;
      p.hf_cells = 80;
      p.hf_dt = 5e-5;
      p.lf_cells = 25;
      p.lf_dt = 2e-4;
      p.n_select = 12;
      break;
    case 4:
      p.sigma = ScatteringField::constant(1.0);
      p.eps = EpsilonField::tanh_profile();
      p.initial = InitialData::double_gaussian(ScatteringField::fourier_sine(1.0, 3.0, 5),
                                               ScatteringField::fourier_cosine(1.0, 2.0, 5));
      p.boundary = BoundarySpec::periodic();
      p.t_final = 0.01;
      p.hf_cells = 50;
      p.hf_dt = 5e-5;
      p.lf_cells = 50;
      p.lf_dt = 1e-4;
      p.n_select = 12;
      break;
    case 5:
      p.sigma = ScatteringField::piecewise_fourier(1.0, 4.0, 5, 0.5, 0.2);
      p.eps = EpsilonField::constant(std::sqrt(0.001));
      p.initial = InitialData::gaussian_pulse(0.01);
      p.boundary = BoundarySpec::periodic();
      p.t_final = 0.01;
      p.hf_cells = 50;
      p.hf_dt = 2.0e-4 / 3.0;
      p.lf_cells = 40;
      p.lf_dt = 2e-4;
      p.n_select = 15;
      break;
    default:
      throw ArgumentError("benchmark_preset: id must be 1..5");
  }
  return p;
}

L2Pair l2_metrics(const std::vector<double>& approx_mean, const std::vector<double>& approx_std,
                  const std::vector<double>& ref_mean, const std::vector<double>& ref_std,
                  double dx) {
  if (approx_mean.size() != ref_mean.size() || approx_std.size() != ref_std.size() ||
      approx_mean.size() != approx_std.size())
    throw ArgumentError("l2_metrics: length mismatch");
  double sm = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < approx_mean.size(); ++i) {
    double dm = approx_mean[i] - ref_mean[i];
    double ds = approx_std[i] - ref_std[i];
    sm += dm * dm;
    ss += ds * ds;
  }
  return {std::sqrt(dx * sm), std::sqrt(dx * ss)};
}

StatProfiles reference_statistics(const TestPreset& preset, const SparseGrid& grid,
                                  int workers) {
  if (grid.dimension != preset.dimension)
    throw ArgumentError("reference_statistics: sparse grid dimension mismatch");
  SolverConfig cfg = preset.hf_config();
  double measure = std::pow(2.0, grid.dimension);
  std::vector<std::vector<double>> sols(grid.size());
  parallel_for_indexed(grid.size(), workers, [&](std::size_t q) {
    sols[q] = tagged("reference node " + std::to_string(q),
                     [&] { return hf_solve(cfg, grid.nodes[q], preset.initial); });
  });
  std::vector<double> w(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) w[q] = grid.weights[q] / measure;
  StatProfiles out;
  weighted_stats(sols, w, out.mean, out.std_dev);
  return out;
}

std::vector<double> resample_linear(const std::vector<double>& values, double src_dx,
                                    int dst_cells, double dst_dx) {
  int n = static_cast<int>(values.size());
  std::vector<double> out(dst_cells);
  for (int i = 0; i < dst_cells; ++i) {
    double x = (i + 0.5) * dst_dx;
    double t = x / src_dx - 0.5;  // position in source cell-center coordinates
    int i0 = static_cast<int>(std::floor(t));
    i0 = std::clamp(i0, 0, n - 2);
    double w = t - i0;
    out[i] = (1.0 - w) * values[i0] + w * values[i0 + 1];
  }
  return out;
}

namespace {

struct Pipeline {
  const TestPreset& preset;
  const PipelineOptions& opts;
  SolverConfig hf_cfg, lf_cfg;
  ExperimentReport rep;
  SnapshotSet lf_cands;
  SelectionResult sel;
  BiFiSurrogate surrogate;
  int n_avail = 0;

  Pipeline(const TestPreset& p, const PipelineOptions& o)
      : preset(p), opts(o), hf_cfg(p.hf_config()), lf_cfg(p.lf_config()) {}

  std::vector<double> lf_at(const ParamVector& z) const {
    return lf_solve(lf_cfg, z, preset.initial);
  }
  std::vector<double> hf_at(const ParamVector& z) const {
    return hf_solve(hf_cfg, z, preset.initial);
  }

  void run(int n_want) {
    rep.hf_stability_usage = hf_stability(hf_cfg).usage();
    rep.lf_stability_usage = lf_stability(lf_cfg).usage();
    rep.x.resize(hf_cfg.grid.n);
    for (int i = 0; i < hf_cfg.grid.n; ++i) rep.x[i] = hf_cfg.grid.center(i);

    candidates_phase();
    selection_phase(n_want);
    snapshots_phase();
    if (opts.with_reference) statistics_phase();
    if (opts.with_validation && n_avail >= 1) validation_phase();
    // bound and R_e per level are shared with the convergence table
    for (ConvergenceRow& row : rep.convergence)
      for (const DiagnosticsRow& d : rep.diagnostics)
        if (d.k == row.n) {
          row.bound = d.bound;
          row.re = d.re;
        }
  }

  void candidates_phase() {
    auto t0 = Clock::now();
    tagged("candidate sweep", [&] {
      std::vector<ParamVector> zc =
          sample_candidates(preset.dimension, preset.n_candidates, opts.seed);
      lf_cands.params = zc;
      lf_cands.ip_weight = lf_cfg.grid.dx;
      lf_cands.columns.resize(zc.size());
      parallel_for_indexed(zc.size(), opts.workers, [&](std::size_t q) {
        lf_cands.columns[q] = tagged("candidate node " + std::to_string(q),
                                     [&] { return lf_at(lf_cands.params[q]); });
      });
      return 0;
    });
    rep.t_candidates = elapsed(t0);
  }

  void selection_phase(int n_want) {
    auto t0 = Clock::now();
    tagged("selection", [&] {
      if (n_want >= 1) {
        sel = select_points(lf_cands, std::min(n_want, lf_cands.count()),
                            opts.selection_tol);
        if (sel.degenerate)
          throw ArgumentError("candidate LF snapshots are all zero; nothing to select");
      }
      n_avail = static_cast<int>(sel.indices.size());
      rep.n_used = std::min(n_want, n_avail);
      rep.selected = sel.indices;
      rep.pivots = sel.pivots;
      return 0;
    });
    rep.t_selection = elapsed(t0);
  }

  void snapshots_phase() {
    auto t0 = Clock::now();
    if (n_avail >= 1) {
      tagged("hf snapshots", [&] {
        std::vector<std::vector<double>> hf_cols(n_avail);
        parallel_for_indexed(static_cast<std::size_t>(n_avail), opts.workers,
                             [&](std::size_t a) {
                               hf_cols[a] =
                                   tagged("hf snapshot " + std::to_string(a), [&] {
                                     return hf_at(lf_cands.params[sel.indices[a]]);
                                   });
                             });
        surrogate = make_surrogate(lf_cands, sel, std::move(hf_cols), hf_cfg.grid.dx);
        rep.hf_gramian_jitter = surrogate.hf_jitter_applied;
        return 0;
      });
    }
    rep.t_hf_snapshots = elapsed(t0);
  }

  void statistics_phase() {
    auto t_ref = Clock::now();
    SparseGrid sg = smolyak_grid(preset.dimension, opts.sparse_level);
    rep.sparse_nodes = sg.size();
    double measure = std::pow(2.0, preset.dimension);
    std::vector<double> w(sg.size());
    for (std::size_t q = 0; q < sg.size(); ++q) w[q] = sg.weights[q] / measure;

    std::vector<std::vector<double>> hf_ref(sg.size());
    parallel_for_indexed(sg.size(), opts.workers, [&](std::size_t q) {
      hf_ref[q] = tagged("reference node " + std::to_string(q),
                         [&] { return hf_at(sg.nodes[q]); });
    });
    const int nh = hf_cfg.grid.n;
    weighted_stats(hf_ref, w, rep.mean_ref, rep.std_ref);
    rep.t_reference = elapsed(t_ref);

    auto t_bf = Clock::now();
    std::vector<std::vector<double>> lf_sparse(sg.size());
    parallel_for_indexed(sg.size(), opts.workers, [&](std::size_t q) {
      lf_sparse[q] = tagged("bifidelity node " + std::to_string(q),
                            [&] { return lf_at(sg.nodes[q]); });
    });

    // LF-only baseline statistics, resampled to the HF grid.
    {
      std::vector<double> mean_lf, std_lf;
      weighted_stats(lf_sparse, w, mean_lf, std_lf);
      std::vector<double> mean_on_hf = resample_linear(mean_lf, lf_cfg.grid.dx, nh,
                                                       hf_cfg.grid.dx);
      std::vector<double> std_on_hf = resample_linear(std_lf, lf_cfg.grid.dx, nh,
                                                      hf_cfg.grid.dx);
      L2Pair base = l2_metrics(mean_on_hf, std_on_hf, rep.mean_ref, rep.std_ref,
                               hf_cfg.grid.dx);
      rep.lf_baseline_e_mean = base.e_mean;
      rep.lf_baseline_e_std = base.e_std;
      if (rep.n_used == 0) {
        rep.mean_bf = mean_on_hf;
        rep.std_bf = std_on_hf;
        rep.e_mean = base.e_mean;
        rep.e_std = base.e_std;
      }
    }

    if (rep.n_used >= 1) {
      tagged("bifidelity statistics", [&] {
        // Right-hand sides of the Gramian systems, one per sparse node.
        std::vector<std::vector<double>> rhs(sg.size());
        parallel_for_indexed(sg.size(), opts.workers, [&](std::size_t q) {
          std::vector<double> f(rep.n_used);
          for (int a = 0; a < rep.n_used; ++a)
            f[a] = surrogate.lf_basis.inner(lf_sparse[q], surrogate.lf_basis.columns[a]);
          rhs[q] = std::move(f);
        });
        std::vector<std::vector<double>> recon(sg.size());
        for (int k = 1; k <= rep.n_used; ++k) {
          for (std::size_t q = 0; q < sg.size(); ++q) {
            std::vector<double> c = surrogate.lf_chol.solve(rhs[q], k);
            recon[q].assign(nh, 0.0);
            for (int a = 0; a < k; ++a) {
              const std::vector<double>& col = surrogate.hf_snapshots[a];
              for (int i = 0; i < nh; ++i) recon[q][i] += c[a] * col[i];
            }
          }
          std::vector<double> mean_k, std_k;
          weighted_stats(recon, w, mean_k, std_k);
          // reported mean uses the accelerated projected-mean route
          std::vector<double> mean_proj = bifi_mean_from_columns(surrogate, lf_sparse, w, k);
          L2Pair err = l2_metrics(mean_proj, std_k, rep.mean_ref, rep.std_ref,
                                  hf_cfg.grid.dx);
          ConvergenceRow row;
          row.n = k;
          row.e_mean = err.e_mean;
          row.e_std = err.e_std;
          rep.convergence.push_back(row);
          if (k == rep.n_used) {
            rep.mean_bf = mean_proj;
            rep.std_bf = std_k;
            rep.e_mean = err.e_mean;
            rep.e_std = err.e_std;
          }
        }
        return 0;
      });
    }
    rep.t_bifidelity = elapsed(t_bf);
  }

  void validation_phase() {
    auto t0 = Clock::now();
    tagged("validation", [&] {
      const int v_count = preset.n_validation;
      std::vector<ParamVector> zv =
          sample_candidates(preset.dimension, v_count, opts.validation_seed);
      std::vector<std::vector<double>> hf_val(zv.size()), lf_val(zv.size());
      parallel_for_indexed(zv.size(), opts.workers, [&](std::size_t q) {
        hf_val[q] = tagged("validation hf " + std::to_string(q),
                           [&] { return hf_at(zv[q]); });
        lf_val[q] = tagged("validation lf " + std::to_string(q),
                           [&] { return lf_at(zv[q]); });
      });

      // Per-sample ingredients reused across truncation levels.
      const int nh = hf_cfg.grid.n;
      std::vector<double> hf_norm2(zv.size()), lf_norm2(zv.size());
      std::vector<std::vector<double>> f_h(zv.size()), f_l(zv.size());
      for (std::size_t q = 0; q < zv.size(); ++q) {
        hf_norm2[q] = surrogate.hf_inner(hf_val[q], hf_val[q]);
        lf_norm2[q] = surrogate.lf_basis.inner(lf_val[q], lf_val[q]);
        f_h[q].resize(n_avail);
        f_l[q].resize(n_avail);
        for (int a = 0; a < n_avail; ++a) {
          f_h[q][a] = surrogate.hf_inner(hf_val[q], surrogate.hf_snapshots[a]);
          f_l[q][a] = surrogate.lf_basis.inner(lf_val[q], surrogate.lf_basis.columns[a]);
        }
      }

      int k_max = std::max(rep.n_used, n_avail - 1);
      std::vector<double> recon(nh);
      for (int k = 1; k <= k_max && k <= n_avail; ++k) {
        DiagnosticsRow row;
        row.k = k;
        std::vector<double> true_errs, rel_l_all, rs_all;
        for (std::size_t q = 0; q < zv.size(); ++q) {
          std::vector<double> c_l = surrogate.lf_chol.solve(f_l[q], k);
          std::fill(recon.begin(), recon.end(), 0.0);
          for (int a = 0; a < k; ++a) {
            const std::vector<double>& col = surrogate.hf_snapshots[a];
            for (int i = 0; i < nh; ++i) recon[i] += c_l[a] * col[i];
          }
          for (int i = 0; i < nh; ++i) recon[i] -= hf_val[q][i];
          double err = surrogate.hf_norm(recon) / std::sqrt(hf_norm2[q]);
          true_errs.push_back(err);

          double d_l = distance_to_span(lf_norm2[q], c_l, f_l[q]);
          rel_l_all.push_back(d_l / std::sqrt(lf_norm2[q]));
          std::vector<double> c_h = surrogate.hf_chol.solve(f_h[q], k);
          double d_h = distance_to_span(hf_norm2[q], c_h, f_h[q]);
          rs_all.push_back(similarity_rs(d_l, std::sqrt(lf_norm2[q]), d_h,
                                         std::sqrt(hf_norm2[q])));
        }
        row.true_err_mean =
            std::accumulate(true_errs.begin(), true_errs.end(), 0.0) / true_errs.size();
        row.re = (k + 1 <= n_avail) ? inplane_re(surrogate, k) : kInf;
        row.bound = error_bound_max(rel_l_all, row.re, opts.bound_c1, opts.bound_c2);
        row.rs_median = median_of(rs_all);
        row.rs_min = *std::min_element(rs_all.begin(), rs_all.end());
        row.rs_max = *std::max_element(rs_all.begin(), rs_all.end());
        rep.diagnostics.push_back(row);
      }
      return 0;
    });
    rep.t_validation = elapsed(t0);
  }
};

}  // namespace

ExperimentReport run_test(const TestPreset& preset, const PipelineOptions& opts) {
  Pipeline p(preset, opts);
  p.run(preset.n_select);
  return p.rep;
}

std::vector<ConvergenceRow> convergence_sweep(const TestPreset& preset,
                                              const std::vector<int>& n_list,
                                              const PipelineOptions& opts) {
  if (n_list.empty()) throw ArgumentError("convergence_sweep: empty n list");
  int n_max = *std::max_element(n_list.begin(), n_list.end());
  if (n_max < 1) throw ArgumentError("convergence_sweep: n values must be >= 1");
  Pipeline p(preset, opts);
  p.run(n_max);
  if (p.rep.n_used < n_max)
    throw ArgumentError("convergence_sweep: selection capacity " +
                        std::to_string(p.rep.n_used) + " below requested n " +
                        std::to_string(n_max));
  std::vector<ConvergenceRow> out;
  for (int n : n_list) {
    for (const ConvergenceRow& row : p.rep.convergence)
      if (row.n == n) {
        out.push_back(row);
        break;
      }
  }
  return out;
}

std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_report(const ExperimentReport& rep, const std::string& dir,
                  const std::string& config_echo) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("write_report: cannot create directory " + dir);

  auto open = [&](const std::string& name) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw IoError("write_report: cannot open " + dir + "/" + name);
    return out;
  };

  {
    std::ofstream out = open("config.echo");
    out << config_echo;
  }
  {
    std::ofstream out = open("profiles.csv");
    out << "x,mean_bf,std_bf,mean_ref,std_ref\n";
    for (std::size_t i = 0; i < rep.x.size(); ++i) {
      auto col = [&](const std::vector<double>& v) {
        return i < v.size() ? fmt17(v[i]) : std::string("nan");
      };
      out << fmt17(rep.x[i]) << ',' << col(rep.mean_bf) << ',' << col(rep.std_bf) << ','
          << col(rep.mean_ref) << ',' << col(rep.std_ref) << '\n';
    }
  }
  {
    std::ofstream out = open("convergence.csv");
    out << "n,e_mean,e_std,bound,Re\n";
    for (const ConvergenceRow& row : rep.convergence)
      out << row.n << ',' << fmt17(row.e_mean) << ',' << fmt17(row.e_std) << ','
          << fmt17(row.bound) << ',' << fmt17(row.re) << '\n';
  }
  {
    std::ofstream out = open("diagnostics.csv");
    out << "k,true_err_mean,bound,Rs_median,Re\n";
    for (const DiagnosticsRow& row : rep.diagnostics)
      out << row.k << ',' << fmt17(row.true_err_mean) << ',' << fmt17(row.bound) << ','
          << fmt17(row.rs_median) << ',' << fmt17(row.re) << '\n';
  }
  {
    std::ofstream out = open("summary.txt");
    out << "n_used = " << rep.n_used << '\n';
    out << "sparse_nodes = " << rep.sparse_nodes << '\n';
    out << "e_mean = " << fmt17(rep.e_mean) << '\n';
    out << "e_std = " << fmt17(rep.e_std) << '\n';
    out << "lf_baseline_e_mean = " << fmt17(rep.lf_baseline_e_mean) << '\n';
    out << "lf_baseline_e_std = " << fmt17(rep.lf_baseline_e_std) << '\n';
    out << "hf_gramian_jitter = " << (rep.hf_gramian_jitter ? 1 : 0) << '\n';
    out << "hf_stability_usage = " << fmt17(rep.hf_stability_usage) << '\n';
    out << "lf_stability_usage = " << fmt17(rep.lf_stability_usage) << '\n';
    out << "selected =";
    for (int idx : rep.selected) out << ' ' << idx;
    out << '\n';
    out << "pivots =";
    for (double p : rep.pivots) out << ' ' << fmt17(p);
    out << '\n';
    // R_s spread over the validation set; the CSV carries the median
    for (const DiagnosticsRow& row : rep.diagnostics)
      out << "rs_envelope k=" << row.k << " min = " << fmt17(row.rs_min)
          << " median = " << fmt17(row.rs_median) << " max = " << fmt17(row.rs_max) << '\n';
    out << "t_candidates_s = " << rep.t_candidates << '\n';
    out << "t_selection_s = " << rep.t_selection << '\n';
    out << "t_hf_snapshots_s = " << rep.t_hf_snapshots << '\n';
    out << "t_reference_s = " << rep.t_reference << '\n';
    out << "t_bifidelity_s = " << rep.t_bifidelity << '\n';
    out << "t_validation_s = " << rep.t_validation << '\n';
  }
}

}  // namespace bifi
