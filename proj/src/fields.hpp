#ifndef BIFI_FIELDS_HPP
#define BIFI_FIELDS_HPP

#include <cstdint>
#include <vector>

namespace bifi {

// Point in the d-dimensional random parameter hypercube [-1,1]^d.
using ParamVector = std::vector<double>;

// Counter-based PRNG (splitmix64 output function): the value at a counter is
// a pure function of (seed, counter), so sample sets are reproducible
// byte-for-byte across machines and thread schedules.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter);
double uniform_pm1_at(std::uint64_t seed, std::uint64_t counter);

// N independent uniform samples on [-1,1]^d; same seed gives the identical
// sequence.
std::vector<ParamVector> sample_candidates(int dimension, int count, std::uint64_t seed);

// Random scattering / coefficient field on [0,1] parameterized by z through a
// truncated Fourier series with 1/(k*pi)^2 decay. Also reused for the random
// initial-density fields, which share this structure.
struct ScatteringField {
  enum class Kind { FourierCosine, FourierSine, PiecewiseFourier, Constant };
  Kind kind = Kind::Constant;
  double base = 1.0;
  double amplitude = 0.0;
  int dimension = 5;
  double breakpoint = 0.5;   // PiecewiseFourier: Fourier form left of this
  double right_value = 0.2;  // PiecewiseFourier: constant value right of it

  static ScatteringField constant(double value);
  static ScatteringField fourier_cosine(double base, double amplitude, int dimension);
  static ScatteringField fourier_sine(double base, double amplitude, int dimension);
  static ScatteringField piecewise_fourier(double base, double amplitude, int dimension,
                                           double breakpoint, double right_value);

  // Certified lower bound over z in [-1,1]^d, at one x or over all x.
  double lower_bound(double x) const;
  double lower_bound() const;
};

double eval_sigma(const ScatteringField& field, double x, const ParamVector& z);

// Knudsen-number field on [0,1].
struct EpsilonField {
  enum class Kind { Constant, Tanh };
  Kind kind = Kind::Constant;
  double value = 1.0;  // Constant
  double floor = 1e-8;
  double slope = 5.5;
  double center = 0.5;

  static EpsilonField constant(double eps);
  // eps(x)^2 = floor + tanh(1 - slope*(x-center)) + tanh(1 + slope*(x-center))
  static EpsilonField tanh_profile();
};

double eval_epsilon(const EpsilonField& field, double x);

// Value affine in the random parameters: c0 + sum_i c_i * z_i.
struct AffineInZ {
  double constant = 0.0;
  std::vector<double> coeffs;  // may be shorter than d; missing entries are 0
  double eval(const ParamVector& z) const;
};

struct BoundarySpec {
  enum class Kind { Periodic, Inflow };
  Kind kind = Kind::Periodic;
  AffineInZ inflow_left;   // incoming value at x = 0
  AffineInZ inflow_right;  // incoming value at x = 1
  static BoundarySpec periodic() { return {}; }
  static BoundarySpec inflow(AffineInZ left, AffineInZ right);
};

// Initial particle density f0(x, v, z), v in (-1,1).
struct InitialData {
  enum class Kind { Zero, DoubleGaussianMaxwellian, RiemannStep, GaussianPulse };
  Kind kind = Kind::Zero;

  // DoubleGaussianMaxwellian: two drifting Gaussians in v with random
  // amplitude fields and x-dependent widths
  //   f0 = rho0 * exp(-((v-0.5)/T0)^2) + rho1 * exp(-((v+0.75)/T1)^2),
  //   T0 = (5 + 2cos(2pi x))/20 * (1 + 0.6 z1),  T1 = 0.5 + 0.2 cos(2pi x) z2.
  ScatteringField rho0;
  ScatteringField rho1;

  // RiemannStep: f0 = left(z) for x < 0.5, 0 otherwise (velocity independent).
  AffineInZ step_left;

  // GaussianPulse: f0 = 1/(2 pi xi) exp(-(x-0.5)^2 / (2 xi)).
  double pulse_xi = 0.01;

  static InitialData zero();
  static InitialData double_gaussian(ScatteringField rho0, ScatteringField rho1);
  static InitialData riemann_step(AffineInZ left);
  static InitialData gaussian_pulse(double xi);

  double f0(double x, double v, const ParamVector& z) const;
  bool velocity_even() const {
    return kind != Kind::DoubleGaussianMaxwellian;
  }
};

}  // namespace bifi

#endif  // BIFI_FIELDS_HPP
