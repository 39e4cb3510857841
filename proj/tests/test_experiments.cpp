#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "errors.hpp"
#include "experiments.hpp"

using namespace bifi;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

// Deterministic setup: constant sigma, so the parameter space collapses.
TestPreset deterministic_preset() {
  TestPreset p;
  p.id = 0;
  p.dimension = 5;
  p.sigma = ScatteringField::constant(1.0);
  p.eps = EpsilonField::constant(0.05);
  p.initial = InitialData::gaussian_pulse(0.01);
  p.boundary = BoundarySpec::periodic();
  p.t_final = 0.005;
  p.hf_cells = 30;
  p.hf_dt = 1e-4;
  p.lf_cells = 30;
  p.lf_dt = 1e-4;
  p.n_select = 4;
  p.n_candidates = 40;
  p.n_validation = 10;
  return p;
}

PipelineOptions small_opts() {
  PipelineOptions opts;
  opts.sparse_level = 2;
  opts.workers = 2;
  return opts;
}

}  // namespace

TEST_CASE("benchmark presets carry their reference discretization values") {
  TestPreset p1 = benchmark_preset(1);
  CHECK(p1.hf_cells == 40);  // dx = 0.025
  CHECK(p1.hf_dt == doctest::Approx(2.0e-4 / 3.0).epsilon(1e-15));
  CHECK(p1.lf_cells == 40);
  CHECK(p1.lf_dt == 2e-4);
  CHECK(p1.t_final == 0.01);
  CHECK(p1.eps.value == 1e-8);
  CHECK(p1.boundary.kind == BoundarySpec::Kind::Inflow);
  CHECK(p1.boundary.inflow_left.eval(ParamVector(5, 0.0)) == 1.0);
  CHECK(p1.boundary.inflow_right.eval(ParamVector(5, 1.0)) == 0.0);
  CHECK(p1.n_select == 12);

  TestPreset p2 = benchmark_preset(2);
  CHECK(p2.hf_cells == 40);
  CHECK(p2.hf_dt == 1e-4);
  CHECK(p2.lf_cells == 25);  // dx = 0.04
  CHECK(p2.lf_dt == 2e-4);
  CHECK(p2.t_final == 0.02);
  CHECK(p2.eps.value == 1e-2);
  CHECK(p2.boundary.kind == BoundarySpec::Kind::Periodic);
  CHECK(p2.initial.kind == InitialData::Kind::DoubleGaussianMaxwellian);

  TestPreset p3 = benchmark_preset(3);
  CHECK(p3.hf_cells == 80);  // dx = 0.0125
  CHECK(p3.hf_dt == 5e-5);
  CHECK(p3.lf_cells == 25);
  CHECK(p3.lf_dt == 2e-4);
  CHECK(p3.initial.kind == InitialData::Kind::RiemannStep);
  CHECK(p3.boundary.inflow_left.eval({0.5, 0, 0, 0, 0}) == doctest::Approx(1.2));

  TestPreset p4 = benchmark_preset(4);
  CHECK(p4.sigma.kind == ScatteringField::Kind::Constant);
  CHECK(p4.eps.kind == EpsilonField::Kind::Tanh);
  CHECK(p4.hf_cells == 50);  // dx = 0.02 in both solvers
  CHECK(p4.lf_cells == 50);
  CHECK(p4.hf_dt == 5e-5);
  CHECK(p4.lf_dt == 1e-4);
  CHECK(p4.t_final == 0.01);

  TestPreset p5 = benchmark_preset(5);
  CHECK(p5.sigma.kind == ScatteringField::Kind::PiecewiseFourier);
  CHECK(p5.eps.value == doctest::Approx(std::sqrt(0.001)).epsilon(1e-15));
  CHECK(p5.hf_cells == 50);
  CHECK(p5.hf_dt == doctest::Approx(2.0e-4 / 3.0).epsilon(1e-15));
  CHECK(p5.lf_cells == 40);
  CHECK(p5.lf_dt == 2e-4);
  CHECK(p5.n_select == 15);

  CHECK_THROWS_AS(benchmark_preset(0), ArgumentError);
  CHECK_THROWS_AS(benchmark_preset(6), ArgumentError);
}

TEST_CASE("every benchmark preset satisfies the solver stability bounds") {
  for (int id = 1; id <= 5; ++id) {
    TestPreset p = benchmark_preset(id);
    StabilityReport hf = hf_stability(p.hf_config());
    StabilityReport lf = lf_stability(p.lf_config());
    INFO("preset ", id, " hf usage ", hf.usage(), " lf usage ", lf.usage());
    CHECK(hf.ok());
    CHECK(lf.ok());
  }
}

TEST_CASE("l2_metrics") {
  std::vector<double> zero(10, 0.0);
  std::vector<double> a(10, 1.5), b(10, 1.0);
  L2Pair same = l2_metrics(a, a, a, a, 0.1);
  CHECK(same.e_mean == 0.0);
  CHECK(same.e_std == 0.0);

  L2Pair constant = l2_metrics(a, zero, b, zero, 0.1);
  CHECK(constant.e_mean == doctest::Approx(0.5).epsilon(1e-14));

  // independent recomputation on random data
  std::vector<double> am(7), as(7), rm(7), rs(7);
  for (int i = 0; i < 7; ++i) {
    am[i] = uniform_pm1_at(1, i);
    as[i] = uniform_pm1_at(2, i);
    rm[i] = uniform_pm1_at(3, i);
    rs[i] = uniform_pm1_at(4, i);
  }
  L2Pair got = l2_metrics(am, as, rm, rs, 1.0 / 7.0);
  double sm = 0, ss = 0;
  for (int i = 0; i < 7; ++i) {
    sm += (am[i] - rm[i]) * (am[i] - rm[i]) / 7.0;
    ss += (as[i] - rs[i]) * (as[i] - rs[i]) / 7.0;
  }
  CHECK(got.e_mean == doctest::Approx(std::sqrt(sm)).epsilon(1e-14));
  CHECK(got.e_std == doctest::Approx(std::sqrt(ss)).epsilon(1e-14));

  CHECK_THROWS_AS(l2_metrics(a, as, rm, rs, 0.1), ArgumentError);
}

TEST_CASE("reference_statistics of a deterministic preset has zero deviation") {
  TestPreset p = deterministic_preset();
  SparseGrid sg = smolyak_grid(5, 1);
  StatProfiles stats = reference_statistics(p, sg, 2);
  std::vector<double> single = hf_solve(p.hf_config(), ParamVector(5, 0.0), p.initial);
  for (int i = 0; i < p.hf_cells; ++i) {
    CHECK(std::abs(stats.std_dev[i]) <= 1e-10);
    CHECK(stats.mean[i] == doctest::Approx(single[i]).epsilon(1e-10));
  }
  CHECK_THROWS_AS(reference_statistics(p, smolyak_grid(3, 1), 1), ArgumentError);
}

TEST_CASE("test-1 reference statistics agree with a diffusion-oracle sweep") {
  TestPreset p = benchmark_preset(1);
  SparseGrid sg = smolyak_grid(5, 2);  // 61 nodes is enough for this check
  StatProfiles hf = reference_statistics(p, sg, 2);

  SolverConfig oracle_cfg = p.hf_config();
  oracle_cfg.dt = 2e-5;
  double measure = std::pow(2.0, 5);
  std::vector<double> mean(p.hf_cells, 0.0), m2(p.hf_cells, 0.0);
  for (std::size_t q = 0; q < sg.size(); ++q) {
    std::vector<double> sol = diffusion_solve(oracle_cfg, sg.nodes[q], p.initial,
                                              DiffusionKind::LTE_third);
    double w = sg.weights[q] / measure;
    for (int i = 0; i < p.hf_cells; ++i) {
      mean[i] += w * sol[i];
      m2[i] += w * sol[i] * sol[i];
    }
  }
  std::vector<double> stddev(p.hf_cells);
  for (int i = 0; i < p.hf_cells; ++i)
    stddev[i] = std::sqrt(std::max(0.0, m2[i] - mean[i] * mean[i]));

  CHECK(rel_l2(hf.mean, mean) <= 1e-2);
  double std_gap = 0.0, mean_norm = 0.0;
  for (int i = 0; i < p.hf_cells; ++i) {
    std_gap += (hf.std_dev[i] - stddev[i]) * (hf.std_dev[i] - stddev[i]);
    mean_norm += mean[i] * mean[i];
  }
  CHECK(std::sqrt(std_gap / mean_norm) <= 1e-2);
}

TEST_CASE("run_test on a deterministic preset returns the single HF profile") {
  TestPreset p = deterministic_preset();
  ExperimentReport rep = run_test(p, small_opts());
  CHECK(rep.n_used == 1);  // identical candidates collapse the selection
  std::vector<double> single = hf_solve(p.hf_config(), ParamVector(5, 0.0), p.initial);
  CHECK(rel_l2(rep.mean_bf, single) <= 1e-8);
  for (double s : rep.std_bf) CHECK(std::abs(s) <= 1e-10);
  CHECK(rep.e_mean <= 1e-8);
}

TEST_CASE("run_test smoke on a reduced test-1 setup") {
  TestPreset p = benchmark_preset(1);
  p.n_select = 5;
  p.n_candidates = 120;
  p.n_validation = 30;
  ExperimentReport rep = run_test(p, small_opts());

  CHECK(rep.n_used >= 4);
  CHECK(rep.sparse_nodes == 61);
  CHECK(rep.e_mean < 1e-2);
  CHECK(rep.e_mean < rep.lf_baseline_e_mean);
  CHECK(rep.convergence.size() == static_cast<std::size_t>(rep.n_used));
  CHECK(rep.diagnostics.size() == static_cast<std::size_t>(rep.n_used));
  for (std::size_t k = 1; k < rep.pivots.size(); ++k)
    CHECK(rep.pivots[k] <= rep.pivots[k - 1]);
  for (const DiagnosticsRow& row : rep.diagnostics) {
    CHECK(row.true_err_mean >= 0.0);
    CHECK(row.bound >= 0.0);
  }
  // bound/Re columns of the convergence table mirror the diagnostics rows
  for (const ConvergenceRow& row : rep.convergence) {
    for (const DiagnosticsRow& d : rep.diagnostics)
      if (d.k == row.n) {
        CHECK(row.bound == d.bound);
        CHECK(row.re == d.re);
      }
  }
}

TEST_CASE("n = 0 produces an LF-baseline-only report") {
  TestPreset p = benchmark_preset(1);
  p.n_select = 0;
  p.n_candidates = 60;
  ExperimentReport rep = run_test(p, small_opts());
  CHECK(rep.n_used == 0);
  CHECK(rep.convergence.empty());
  CHECK(rep.e_mean == rep.lf_baseline_e_mean);
  CHECK(rep.lf_baseline_e_mean > 1e-3);  // LF alone is visibly off on this setup
  CHECK(rep.mean_bf.size() == rep.mean_ref.size());
}

TEST_CASE("convergence_sweep reuses one selection and filters rows") {
  TestPreset p = benchmark_preset(1);
  p.n_select = 6;
  p.n_candidates = 120;
  p.n_validation = 20;
  std::vector<ConvergenceRow> rows = convergence_sweep(p, {1, 3, 5}, small_opts());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n == 1);
  CHECK(rows[1].n == 3);
  CHECK(rows[2].n == 5);
  CHECK(rows[2].e_mean <= rows[0].e_mean);

  CHECK_THROWS_AS(convergence_sweep(p, {}, small_opts()), ArgumentError);
  CHECK_THROWS_AS(convergence_sweep(p, {500}, small_opts()), ArgumentError);
}

TEST_CASE("resample_linear") {
  std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  // identical grids reproduce the values
  std::vector<double> same = resample_linear(v, 0.25, 4, 0.25);
  for (int i = 0; i < 4; ++i) CHECK(same[i] == doctest::Approx(v[i]).epsilon(1e-15));
  // a linear profile is reproduced exactly at interior points
  std::vector<double> src(10);
  for (int i = 0; i < 10; ++i) src[i] = 0.3 + 2.0 * ((i + 0.5) * 0.1);
  std::vector<double> dst = resample_linear(src, 0.1, 25, 0.04);
  for (int i = 0; i < 25; ++i)
    CHECK(dst[i] == doctest::Approx(0.3 + 2.0 * ((i + 0.5) * 0.04)).epsilon(1e-12));
}

TEST_CASE("write_report produces the four artifacts plus summary") {
  TestPreset p = deterministic_preset();
  ExperimentReport rep = run_test(p, small_opts());
  std::string dir = "test_report_tmp";
  std::filesystem::remove_all(dir);
  write_report(rep, dir, "[run]\ncommand = run-test\n");
  for (const char* name :
       {"config.echo", "profiles.csv", "convergence.csv", "diagnostics.csv", "summary.txt"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(dir + "/" + std::string(name)));
  }
  std::ifstream profiles(dir + "/profiles.csv");
  std::string header;
  std::getline(profiles, header);
  CHECK(header == "x,mean_bf,std_bf,mean_ref,std_ref");
  std::filesystem::remove_all(dir);
}

TEST_CASE("fmt17 renders sentinels and round-trippable reals") {
  CHECK(fmt17(kInf) == "inf");
  CHECK(fmt17(-kInf) == "-inf");
  double v = 0.1 + 0.2;
  CHECK(std::stod(fmt17(v)) == v);
  CHECK(fmt17(1.0) == "1");
}
