#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace bifi {

namespace {

void write_profile_csv(const std::string& dir, const std::string& name,
                       const std::string& header, const std::vector<double>& x,
                       const std::vector<std::vector<double>>& cols) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) throw IoError("cannot open " + dir + "/" + name);
  out << header << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << fmt17(x[i]);
    for (const auto& c : cols) out << ',' << fmt17(c[i]);
    out << '\n';
  }
}

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) throw IoError("cannot open " + dir + "/" + name);
  out << text;
}

std::vector<double> grid_centers(const SpatialGrid& g) {
  std::vector<double> x(g.n);
  for (int i = 0; i < g.n; ++i) x[i] = g.center(i);
  return x;
}

RunOutcome run_report_command(const RunConfig& cfg, const ResolvedRun& run, bool sweep) {
  TestPreset preset = run.preset;
  if (sweep) {
    preset.n_select = *std::max_element(run.n_list.begin(), run.n_list.end());
    if (preset.n_select > preset.n_candidates)
      throw ArgumentError("sweep: max n exceeds the candidate count");
  }
  ExperimentReport rep = run_test(preset, run.opts);
  if (sweep) {
    if (rep.n_used < preset.n_select)
      throw ArgumentError("sweep: selection stopped at " + std::to_string(rep.n_used) +
                          " points, below the requested " + std::to_string(preset.n_select));
    std::vector<ConvergenceRow> rows;
    for (int n : run.n_list)
      for (const ConvergenceRow& row : rep.convergence)
        if (row.n == n) {
          rows.push_back(row);
          break;
        }
    rep.convergence = rows;
  }
  write_report(rep, run.out_dir, render_canonical(cfg));

  RunOutcome out;
  out.files_written = {run.out_dir + "/config.echo", run.out_dir + "/profiles.csv",
                       run.out_dir + "/convergence.csv", run.out_dir + "/diagnostics.csv",
                       run.out_dir + "/summary.txt"};
  out.x = rep.x;
  out.mean_bf = rep.mean_bf;
  out.std_bf = rep.std_bf;
  out.mean_ref = rep.mean_ref;
  out.std_ref = rep.std_ref;
  out.e_mean = rep.e_mean;
  out.e_std = rep.e_std;
  std::ostringstream s;
  s << "preset " << (preset.id == 0 ? std::string("custom") : std::to_string(preset.id))
    << ": n = " << rep.n_used << ", sparse nodes = " << rep.sparse_nodes << "\n"
    << "e_mean = " << fmt17(rep.e_mean) << ", e_std = " << fmt17(rep.e_std) << "\n"
    << "lf baseline e_mean = " << fmt17(rep.lf_baseline_e_mean)
    << ", e_std = " << fmt17(rep.lf_baseline_e_std) << "\n"
    << "stability usage: hf = " << fmt17(rep.hf_stability_usage)
    << ", lf = " << fmt17(rep.lf_stability_usage) << "\n"
    << "phases (s): candidates " << rep.t_candidates << ", selection " << rep.t_selection
    << ", hf snapshots " << rep.t_hf_snapshots << ", reference " << rep.t_reference
    << ", bifidelity " << rep.t_bifidelity << ", validation " << rep.t_validation << "\n"
    << "report written to " << run.out_dir << "\n";
  out.summary = s.str();
  return out;
}

}  // namespace

RunOutcome execute(const RunConfig& cfg) {
  ResolvedRun run = resolve(cfg);
  if (run.command == "run-test") return run_report_command(cfg, run, false);
  if (run.command == "sweep") return run_report_command(cfg, run, true);

  if (run.command == "solve-hf" || run.command == "solve-lf") {
    RunOutcome out;
    bool hf = run.command == "solve-hf";
    SolverConfig scfg = hf ? run.preset.hf_config() : run.preset.lf_config();
    out.qoi = hf ? hf_solve(scfg, run.z, run.preset.initial)
                 : lf_solve(scfg, run.z, run.preset.initial);
    out.x = grid_centers(scfg.grid);
    write_profile_csv(run.out_dir, "profile.csv", hf ? "x,rbar" : "x,rho", out.x, {out.qoi});
    write_text(run.out_dir, "config.echo", render_canonical(cfg));
    out.files_written = {run.out_dir + "/profile.csv", run.out_dir + "/config.echo"};
    std::ostringstream s;
    s << run.command << " done: " << out.x.size() << " cells at t = "
      << fmt17(scfg.t_final) << ", profile written to " << run.out_dir << "/profile.csv\n";
    out.summary = s.str();
    return out;
  }

  if (run.command == "reference") {
    RunOutcome out;
    SparseGrid sg = smolyak_grid(run.preset.dimension, run.opts.sparse_level);
    StatProfiles stats = reference_statistics(run.preset, sg, run.opts.workers);
    out.x = grid_centers(run.preset.hf_config().grid);
    out.mean_ref = stats.mean;
    out.std_ref = stats.std_dev;
    write_profile_csv(run.out_dir, "reference.csv", "x,mean,std", out.x,
                      {stats.mean, stats.std_dev});
    write_text(run.out_dir, "config.echo", render_canonical(cfg));
    out.files_written = {run.out_dir + "/reference.csv", run.out_dir + "/config.echo"};
    std::ostringstream s;
    s << "reference statistics over " << sg.size() << " sparse nodes written to "
      << run.out_dir << "/reference.csv\n";
    out.summary = s.str();
    return out;
  }

  if (run.command == "selftest") {
    RunOutcome out;
    std::string report;
    int failures = selftest(report);
    out.selftest_failures = failures;
    out.summary = report;
    return out;
  }

  throw ArgumentError("unknown command " + run.command);
}

namespace {

struct CheckHarness {
  int passed = 0;
  int failed = 0;
  std::ostringstream lines;

  void check(const std::string& name, bool ok) {
    (ok ? passed : failed) += 1;
    lines << (ok ? "  ok  " : "  FAIL") << "  " << name << "\n";
  }
  void close(const std::string& value_name, double got, double want, double tol) {
    check(value_name + " (got " + fmt17(got) + ", want " + fmt17(want) + ")",
          std::abs(got - want) <= tol);
  }
};

}  // namespace

int selftest(std::string& report) {
  CheckHarness h;

  {  // velocity quadrature
    VelocityQuadrature q1 = gauss_legendre_unit(1);
    h.close("gl(1) node", q1.nodes[0], 0.5, 1e-15);
    h.close("gl(1) weight", q1.weights[0], 1.0, 1e-15);
    VelocityQuadrature q2 = gauss_legendre_unit(2);
    h.close("gl(2) node0", q2.nodes[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-14);
    h.close("gl(2) node1", q2.nodes[1], 0.5 + 0.5 / std::sqrt(3.0), 1e-14);
    VelocityQuadrature q16 = gauss_legendre_unit(16);
    double worst = 0.0;
    for (int k = 0; k <= 31; ++k) {
      double s = 0.0;
      for (int m = 0; m < 16; ++m) s += q16.weights[m] * std::pow(q16.nodes[m], k);
      worst = std::max(worst, std::abs(s - 1.0 / (k + 1)));
    }
    h.check("gl(16) exact on degree <= 31", worst < 1e-12);
  }
  {  // Clenshaw-Curtis
    Rule1d c0 = clenshaw_curtis_1d(0);
    h.check("cc(0) = {0}/{2}", c0.nodes == std::vector<double>{0.0} &&
                                   std::abs(c0.weights[0] - 2.0) < 1e-15);
    Rule1d c1 = clenshaw_curtis_1d(1);
    h.close("cc(1) end weight", c1.weights[0], 1.0 / 3.0, 1e-14);
    h.close("cc(1) mid weight", c1.weights[1], 4.0 / 3.0, 1e-14);
    Rule1d c3 = clenshaw_curtis_1d(3);
    double s4 = 0.0;
    for (std::size_t i = 0; i < c3.nodes.size(); ++i)
      s4 += c3.weights[i] * std::pow(c3.nodes[i], 4);
    h.close("cc(3) integrates x^4", s4, 2.0 / 5.0, 1e-12);
  }
  {  // sparse grid moments, d=2 level 1
    SparseGrid sg = smolyak_grid(2, 1);
    double m0 = 0, m1 = 0, m11 = 0, m2 = 0;
    for (std::size_t q = 0; q < sg.size(); ++q) {
      double z1 = sg.nodes[q][0], z2 = sg.nodes[q][1], w = sg.weights[q];
      m0 += w;
      m1 += w * z1;
      m11 += w * z1 * z2;
      m2 += w * z1 * z1;
    }
    h.close("smolyak(2,1) total measure", m0, 4.0, 1e-12);
    h.close("smolyak(2,1) odd moment", m1, 0.0, 1e-12);
    h.close("smolyak(2,1) mixed moment", m11, 0.0, 1e-12);
    h.close("smolyak(2,1) second moment", m2, 4.0 / 3.0, 1e-12);
  }
  {  // scattering / epsilon fields
    ScatteringField sig = ScatteringField::fourier_cosine(1.0, 4.0, 5);
    h.close("sigma at z=0", eval_sigma(sig, 0.3, ParamVector(5, 0.0)), 1.0, 1e-15);
    double expect = 1.0;
    for (int k = 1; k <= 5; ++k)
      expect += 4.0 / (k * k * 3.14159265358979323846 * 3.14159265358979323846);
    h.close("sigma at x=0, z=1", eval_sigma(sig, 0.0, ParamVector(5, 1.0)), expect, 1e-12);
    ScatteringField pw = ScatteringField::piecewise_fourier(1.0, 4.0, 5, 0.5, 0.2);
    h.close("piecewise sigma right half", eval_sigma(pw, 0.75, ParamVector(5, 0.3)), 0.2,
            1e-15);
    EpsilonField tanh_eps = EpsilonField::tanh_profile();
    h.close("tanh eps at center", eval_epsilon(tanh_eps, 0.5),
            std::sqrt(1e-8 + 2.0 * std::tanh(1.0)), 1e-14);
    h.close("tanh eps symmetry", eval_epsilon(tanh_eps, 0.0) - eval_epsilon(tanh_eps, 1.0),
            0.0, 1e-14);
  }
  {  // relaxation stage hand values
    SolverConfig cfg;
    cfg.grid = SpatialGrid::uniform(4);
    cfg.eps = EpsilonField::constant(1.0);
    cfg.sigma = ScatteringField::constant(1.0);
    cfg.vq.nodes = {0.25, 0.75};
    cfg.vq.weights = {0.5, 0.5};
    cfg.dt = 1.0;  // lambda = dt sigma / eps^2 = 1
    KineticState st;
    st.nx = 4;
    st.nv = 2;
    st.r.assign(8, 0.0);
    st.j.assign(8, 0.0);
    for (int i = 0; i < 4; ++i) {
      st.r_at(i, 0) = 1.0;
      st.r_at(i, 1) = 2.0;
    }
    hf_relaxation_stage(st, cfg, ParamVector{}, 1.0);
    h.close("relaxation r*(v0)", st.r_at(1, 0), 1.25, 1e-15);
    h.close("relaxation r*(v1)", st.r_at(1, 1), 1.75, 1e-15);
    MacroState mst;
    mst.rho.assign(4, 2.0);
    mst.s.assign(4, 0.8);
    lf_relaxation_stage(mst, cfg, ParamVector{}, 1.0);
    h.close("lf relaxation s* = s/2", mst.s[2], 0.4, 1e-15);
  }
  {  // equilibrium fixed points
    SolverConfig cfg;
    cfg.grid = SpatialGrid::uniform(16);
    cfg.dt = 1e-3;
    cfg.t_final = 0.0;
    cfg.eps = EpsilonField::constant(0.5);
    cfg.sigma = ScatteringField::constant(2.0);
    cfg.vq = gauss_legendre_unit(4);
    KineticState st;
    st.nx = 16;
    st.nv = 4;
    st.r.assign(64, 3.0);
    st.j.assign(64, 0.0);
    KineticState next = hf_step(st, cfg, ParamVector{});
    double drift = 0.0;
    for (std::size_t i = 0; i < next.r.size(); ++i)
      drift = std::max({drift, std::abs(next.r[i] - 3.0), std::abs(next.j[i])});
    h.check("hf equilibrium fixed to 1e-14", drift <= 1e-14);
    MacroState mst;
    mst.rho.assign(16, 3.0);
    mst.s.assign(16, 0.0);
    MacroState mnext = lf_step(mst, cfg, ParamVector{});
    double mdrift = 0.0;
    for (int i = 0; i < 16; ++i)
      mdrift = std::max({mdrift, std::abs(mnext.rho[i] - 3.0), std::abs(mnext.s[i])});
    h.check("lf equilibrium fixed to 1e-14", mdrift <= 1e-14);
  }
  {  // periodic mass conservation, pulse setup
    TestPreset p = benchmark_preset(5);
    SolverConfig cfg = p.lf_config();
    ParamVector z(5, 0.25);
    MacroState st = lf_initial_state(p.initial, cfg.grid, cfg.vq, z, cfg.eps);
    double mass0 = 0.0;
    for (double v : st.rho) mass0 += v * cfg.grid.dx;
    for (int k = 0; k < 20; ++k) st = lf_step(st, cfg, z);
    double mass1 = 0.0;
    for (double v : st.rho) mass1 += v * cfg.grid.dx;
    h.check("lf periodic mass conserved to 1e-12", std::abs(mass1 - mass0) <= 1e-12);
  }
  {  // selection and projection on a synthetic set
    SnapshotSet set;
    set.ip_weight = 0.1;
    int k_cand = 8, len = 6;
    for (int c = 0; c < k_cand; ++c) {
      std::vector<double> col(len);
      for (int i = 0; i < len; ++i)
        col[i] = uniform_pm1_at(42, static_cast<std::uint64_t>(c) * len + i);
      set.columns.push_back(col);
      set.params.push_back(ParamVector{static_cast<double>(c)});
    }
    // make column 3 dominant so it must be picked first
    for (double& v : set.columns[3]) v *= 10.0;
    SelectionResult sel = select_points(set, 5, 1e-12);
    h.check("selection picks the dominant column first", sel.indices[0] == 3);
    bool mono = true;
    for (std::size_t i = 1; i < sel.pivots.size(); ++i)
      mono = mono && sel.pivots[i] <= sel.pivots[i - 1];
    h.check("selection pivots non-increasing", mono);

    std::vector<std::vector<double>> hf_cols;
    for (int idx : sel.indices) {
      std::vector<double> col = set.columns[idx];
      for (double& v : col) v = 2.0 * v + 1.0;
      hf_cols.push_back(col);
    }
    BiFiSurrogate s = make_surrogate(set, sel, hf_cols, 0.1);
    std::vector<double> c = project_coeffs(set.columns[sel.indices[1]], s);
    bool unit = std::abs(c[1] - 1.0) < 1e-8;
    for (std::size_t a = 0; a < c.size(); ++a)
      if (a != 1) unit = unit && std::abs(c[a]) < 1e-8;
    h.check("projection of a basis member is a unit vector", unit);
    std::vector<double> c2 = project_coeffs(set.columns[sel.indices[1]], s);
    bool idem = true;
    for (std::size_t a = 0; a < c.size(); ++a) idem = idem && c[a] == c2[a];
    h.check("projection deterministic", idem);
  }
  {  // estimator arithmetic
    h.close("Rs identical models", similarity_rs(0.3, 1.5, 0.2, 1.0), 1.0, 1e-15);
    h.close("Rs hf in span", similarity_rs(0.3, 1.5, 0.0, 1.0), 0.0, 1e-15);
    bool degen = false;
    double rs = similarity_rs(0.0, 1.0, 0.1, 1.0, &degen);
    h.check("Rs degenerate sentinel", std::isinf(rs) && degen);
    h.close("bound with Re=0 reduces to LF distance",
            error_bound_max({0.125, 0.25, 0.0625}, 0.0), 0.25, 1e-15);
  }
  {  // error metric
    std::vector<double> a(10, 1.5), b(10, 1.0), zero(10, 0.0);
    L2Pair e = l2_metrics(a, zero, b, zero, 0.1);
    h.close("l2 metric of constant difference", e.e_mean, 0.5, 1e-14);
    h.close("l2 metric of equal stds", e.e_std, 0.0, 1e-15);
  }
  {  // sampling determinism
    auto s1 = sample_candidates(5, 4, 7);
    auto s2 = sample_candidates(5, 4, 7);
    bool same = s1 == s2;
    bool in_range = true;
    for (const auto& z : s1)
      for (double v : z) in_range = in_range && v >= -1.0 && v <= 1.0;
    h.check("sampling reproducible and in range", same && in_range);
  }

  std::ostringstream head;
  head << "selftest: " << h.passed << " passed, " << h.failed << " failed\n";
  report = head.str() + h.lines.str();
  return h.failed;
}

}  // namespace bifi
