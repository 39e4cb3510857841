#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "errors.hpp"
#include "fields.hpp"
#include "solvers.hpp"

using namespace bifi;

namespace {
constexpr double kPi = 3.14159265358979323846;

ParamVector ones(int d) { return ParamVector(d, 1.0); }
ParamVector zeros(int d) { return ParamVector(d, 0.0); }
}  // namespace

TEST_CASE("eval_sigma fourier-cosine examples") {
  ScatteringField f = ScatteringField::fourier_cosine(1.0, 4.0, 5);
  CHECK(eval_sigma(f, 0.37, zeros(5)) == doctest::Approx(1.0).epsilon(1e-15));

  double expected = 1.0;
  for (int i = 1; i <= 5; ++i) expected += 4.0 / ((i * kPi) * (i * kPi));
  CHECK(eval_sigma(f, 0.0, ones(5)) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(expected == doctest::Approx(1.59318).epsilon(1e-4));

  CHECK_THROWS_AS(eval_sigma(f, 0.5, zeros(4)), ArgumentError);
}

TEST_CASE("eval_sigma piecewise field returns the constant right of the break") {
  ScatteringField f = ScatteringField::piecewise_fourier(1.0, 4.0, 5, 0.5, 0.2);
  ParamVector z = {0.3, -0.9, 0.4, 0.8, -0.1};
  CHECK(eval_sigma(f, 0.75, z) == 0.2);
  CHECK(eval_sigma(f, 0.99, z) == 0.2);
  // left of (and at) the break the Fourier form applies
  double left = 1.0;
  for (int i = 1; i <= 5; ++i)
    left += 4.0 * std::cos(2.0 * kPi * i * 0.25) / ((i * kPi) * (i * kPi)) * z[i - 1];
  CHECK(eval_sigma(f, 0.25, z) == doctest::Approx(left).epsilon(1e-14));
}

TEST_CASE("field construction rejects non-positive configurations") {
  CHECK_THROWS_AS(ScatteringField::fourier_cosine(1.0, 10.0, 5), ArgumentError);
  CHECK_THROWS_AS(ScatteringField::constant(0.0), ArgumentError);
  CHECK_THROWS_AS(ScatteringField::piecewise_fourier(1.0, 4.0, 5, 0.5, -0.2), ArgumentError);
  CHECK_NOTHROW(ScatteringField::fourier_cosine(1.0, 4.0, 5));
}

TEST_CASE("sigma positivity over a 100-sample sweep at 101 x points") {
  ScatteringField fields[] = {ScatteringField::fourier_cosine(1.0, 4.0, 5),
                              ScatteringField::fourier_sine(1.0, 3.0, 5),
                              ScatteringField::fourier_cosine(1.0, 2.0, 5),
                              ScatteringField::piecewise_fourier(1.0, 4.0, 5, 0.5, 0.2)};
  auto zs = sample_candidates(5, 100, 99);
  for (const auto& f : fields) {
    CHECK(f.lower_bound() > 0.0);
    for (const auto& z : zs)
      for (int i = 0; i <= 100; ++i) {
        double x = i / 100.0;
        CHECK(eval_sigma(f, x, z) > 0.0);
        CHECK(eval_sigma(f, x, z) >= f.lower_bound(x) - 1e-12);
      }
  }
}

TEST_CASE("eval_epsilon constant and tanh profiles") {
  EpsilonField c = EpsilonField::constant(1e-8);
  CHECK(eval_epsilon(c, 0.1) == 1e-8);
  CHECK(eval_epsilon(c, 0.9) == 1e-8);
  CHECK_THROWS_AS(EpsilonField::constant(0.0), ArgumentError);

  EpsilonField t = EpsilonField::tanh_profile();
  double center = std::sqrt(1e-8 + 2.0 * std::tanh(1.0));
  CHECK(eval_epsilon(t, 0.5) == doctest::Approx(center).epsilon(1e-14));
  CHECK(eval_epsilon(t, 0.0) == doctest::Approx(eval_epsilon(t, 1.0)).epsilon(1e-14));
  // profile spans roughly 1e-1 .. 1e0 across the domain
  for (int i = 0; i <= 50; ++i) {
    double e = eval_epsilon(t, i / 50.0);
    CHECK(e > 0.1);
    CHECK(e < 1.5);
  }
}

TEST_CASE("hf_initial_state zero preset and even pulse") {
  SpatialGrid grid = SpatialGrid::uniform(20);
  VelocityQuadrature vq = gauss_legendre_unit(8);
  EpsilonField eps = EpsilonField::constant(1e-2);
  ParamVector z = zeros(5);

  KineticState zero = hf_initial_state(InitialData::zero(), grid, vq, z, eps);
  for (double v : zero.r) CHECK(v == 0.0);
  for (double v : zero.j) CHECK(v == 0.0);

  InitialData pulse = InitialData::gaussian_pulse(0.01);
  KineticState st = hf_initial_state(pulse, grid, vq, z, eps);
  for (int i = 0; i < grid.n; ++i) {
    double f0 = pulse.f0(grid.center(i), 0.0, z);
    for (int m = 0; m < vq.size(); ++m) {
      CHECK(st.j_at(i, m) == 0.0);
      CHECK(st.r_at(i, m) == doctest::Approx(f0).epsilon(1e-15));
    }
  }
}

TEST_CASE("hf_initial_state double-gaussian value at z=0 against a scalar oracle") {
  SpatialGrid grid = SpatialGrid::uniform(20);  // center index 4 sits at x = 0.225
  VelocityQuadrature vq;
  vq.nodes = {0.5};
  vq.weights = {1.0};
  EpsilonField eps = EpsilonField::constant(1e-2);
  InitialData d2 = InitialData::double_gaussian(ScatteringField::fourier_sine(1.0, 3.0, 5),
                                                ScatteringField::fourier_cosine(1.0, 2.0, 5));
  // independent evaluation of the double-Gaussian formula at x = 0.25, v = 0.5
  double x = 0.25, v = 0.5;
  double t0 = (5.0 + 2.0 * std::cos(2.0 * kPi * x)) / 20.0;
  double t1 = 0.5;
  CHECK(t0 == doctest::Approx(0.25).epsilon(1e-15));
  auto f0 = [&](double vel) {
    return std::exp(-std::pow((vel - 0.5) / t0, 2)) + std::exp(-std::pow((vel + 0.75) / t1, 2));
  };
  double want_r = 0.5 * (f0(v) + f0(-v));
  double want_j = 0.5 * (f0(v) - f0(-v)) / 1e-2;

  // evaluate through the public path on a grid with a cell center at x = 0.25
  SpatialGrid g6 = SpatialGrid::uniform(6);
  KineticState st = hf_initial_state(d2, g6, vq, zeros(5), eps);
  CHECK(g6.center(1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(st.r_at(1, 0) == doctest::Approx(want_r).epsilon(1e-13));
  CHECK(st.j_at(1, 0) == doctest::Approx(want_j).epsilon(1e-13));
}

TEST_CASE("initialization from a non-negative density keeps r non-negative") {
  SpatialGrid grid = SpatialGrid::uniform(32);
  VelocityQuadrature vq = gauss_legendre_unit(16);
  EpsilonField eps = EpsilonField::constant(1e-2);
  InitialData d2 = InitialData::double_gaussian(ScatteringField::fourier_sine(1.0, 3.0, 5),
                                                ScatteringField::fourier_cosine(1.0, 2.0, 5));
  for (const auto& z : sample_candidates(5, 20, 55)) {
    KineticState st = hf_initial_state(d2, grid, vq, z, eps);
    for (double r : st.r) CHECK(r >= -1e-12);
  }
}

TEST_CASE("parity reconstruction recovers f0 at the nodes") {
  SpatialGrid grid = SpatialGrid::uniform(16);
  VelocityQuadrature vq = gauss_legendre_unit(6);
  EpsilonField eps = EpsilonField::constant(0.05);
  InitialData d2 = InitialData::double_gaussian(ScatteringField::fourier_sine(1.0, 3.0, 5),
                                                ScatteringField::fourier_cosine(1.0, 2.0, 5));
  auto zs = sample_candidates(5, 5, 1234);
  for (const auto& z : zs) {
    KineticState st = hf_initial_state(d2, grid, vq, z, eps);
    for (int i = 0; i < grid.n; ++i) {
      double x = grid.center(i);
      double e = eval_epsilon(eps, x);
      for (int m = 0; m < vq.size(); ++m) {
        double v = vq.nodes[m];
        double plus = st.r_at(i, m) + e * st.j_at(i, m);
        double minus = st.r_at(i, m) - e * st.j_at(i, m);
        CHECK(plus == doctest::Approx(d2.f0(x, v, z)).epsilon(1e-12));
        CHECK(minus == doctest::Approx(d2.f0(x, -v, z)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("lf_initial_state zero, pulse, and quadrature oracle") {
  SpatialGrid grid = SpatialGrid::uniform(25);
  VelocityQuadrature vq = gauss_legendre_unit(16);
  EpsilonField eps = EpsilonField::constant(1e-2);
  ParamVector z0 = zeros(5);

  MacroState z = lf_initial_state(InitialData::zero(), grid, vq, z0, eps);
  for (double v : z.rho) CHECK(v == 0.0);
  for (double v : z.s) CHECK(v == 0.0);

  InitialData pulse = InitialData::gaussian_pulse(0.01);
  MacroState p = lf_initial_state(pulse, grid, vq, z0, eps);
  for (int i = 0; i < grid.n; ++i) {
    CHECK(p.rho[i] == doctest::Approx(pulse.f0(grid.center(i), 0.0, z0)).epsilon(1e-13));
    CHECK(p.s[i] == 0.0);
  }

  // dense-quadrature oracle: rho must match a 1000-point trapezoid average of
  // r(x, v) over v in (0,1)
  InitialData d2 = InitialData::double_gaussian(ScatteringField::fourier_sine(1.0, 3.0, 5),
                                                ScatteringField::fourier_cosine(1.0, 2.0, 5));
  MacroState m = lf_initial_state(d2, grid, vq, z0, eps);
  for (int i = 0; i < grid.n; i += 5) {
    double x = grid.center(i);
    int panels = 1000;
    double acc = 0.0;
    for (int k = 0; k <= panels; ++k) {
      double v = static_cast<double>(k) / panels;
      double r = 0.5 * (d2.f0(x, v, z0) + d2.f0(x, -v, z0));
      acc += (k == 0 || k == panels) ? 0.5 * r : r;
    }
    acc /= panels;
    CHECK(m.rho[i] == doctest::Approx(acc).epsilon(1e-6));
  }
}

TEST_CASE("sample_candidates determinism, range, and moments") {
  auto a = sample_candidates(5, 3, 7);
  auto b = sample_candidates(5, 3, 7);
  CHECK(a == b);  // bit-identical

  auto big = sample_candidates(5, 10000, 31);
  double mean[5] = {0, 0, 0, 0, 0};
  for (const auto& z : big) {
    REQUIRE(z.size() == 5);
    for (int k = 0; k < 5; ++k) {
      CHECK(z[k] >= -1.0);
      CHECK(z[k] <= 1.0);
      mean[k] += z[k];
    }
  }
  for (double m : mean) CHECK(std::abs(m / 10000.0) < 0.05);

  auto single = sample_candidates(1, 1, 5);
  REQUIRE(single.size() == 1);
  CHECK(single[0].size() == 1);

  CHECK_THROWS_AS(sample_candidates(5, 0, 7), ArgumentError);
}

TEST_CASE("affine inflow values") {
  AffineInZ g{1.0, {0.4}};
  CHECK(g.eval(zeros(5)) == 1.0);
  CHECK(g.eval({0.5, -1.0, 0.0, 0.0, 0.0}) == doctest::Approx(1.2).epsilon(1e-15));
  BoundarySpec bc = BoundarySpec::inflow(g, {0.0, {}});
  CHECK(bc.kind == BoundarySpec::Kind::Inflow);
}
