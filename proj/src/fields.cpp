#include "fields.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace bifi {

namespace {
constexpr double kPi = 3.14159265358979323846;

// sum_{k=1..d} 1/(k pi)^2, the worst-case Fourier tail.
double fourier_tail(int dimension) {
  double s = 0.0;
  for (int k = 1; k <= dimension; ++k) s += 1.0 / ((k * kPi) * (k * kPi));
  return s;
}

void check_positive_field(const ScatteringField& f, const char* what) {
  double bound = f.lower_bound();
  if (!(bound > 0.0))
    throw ArgumentError(std::string(what) +
                        ": field is not certifiably positive on [0,1] x [-1,1]^d");
}
}  // namespace

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_pm1_at(std::uint64_t seed, std::uint64_t counter) {
  double u01 = static_cast<double>(splitmix64_at(seed, counter) >> 11) * 0x1.0p-53;
  return 2.0 * u01 - 1.0;
}

std::vector<ParamVector> sample_candidates(int dimension, int count, std::uint64_t seed) {
  if (dimension < 1) throw ArgumentError("sample_candidates: dimension must be >= 1");
  if (count < 1) throw ArgumentError("sample_candidates: count must be >= 1");
  std::vector<ParamVector> out(count);
  for (int i = 0; i < count; ++i) {
    ParamVector z(dimension);
    for (int k = 0; k < dimension; ++k)
      z[k] = uniform_pm1_at(seed, static_cast<std::uint64_t>(i) * dimension + k);
    out[i] = std::move(z);
  }
  return out;
}

ScatteringField ScatteringField::constant(double value) {
  ScatteringField f;
  f.kind = Kind::Constant;
  f.base = value;
  f.dimension = 0;
  check_positive_field(f, "ScatteringField::constant");
  return f;
}

ScatteringField ScatteringField::fourier_cosine(double base, double amplitude, int dimension) {
  ScatteringField f;
  f.kind = Kind::FourierCosine;
  f.base = base;
  f.amplitude = amplitude;
  f.dimension = dimension;
  check_positive_field(f, "ScatteringField::fourier_cosine");
  return f;
}

ScatteringField ScatteringField::fourier_sine(double base, double amplitude, int dimension) {
  ScatteringField f;
  f.kind = Kind::FourierSine;
  f.base = base;
  f.amplitude = amplitude;
  f.dimension = dimension;
  check_positive_field(f, "ScatteringField::fourier_sine");
  return f;
}

ScatteringField ScatteringField::piecewise_fourier(double base, double amplitude, int dimension,
                                                   double breakpoint, double right_value) {
  ScatteringField f;
  f.kind = Kind::PiecewiseFourier;
  f.base = base;
  f.amplitude = amplitude;
  f.dimension = dimension;
  f.breakpoint = breakpoint;
  f.right_value = right_value;
  check_positive_field(f, "ScatteringField::piecewise_fourier");
  return f;
}

double ScatteringField::lower_bound(double x) const {
  switch (kind) {
    case Kind::Constant:
      return base;
    case Kind::PiecewiseFourier:
      if (x > breakpoint && x < 1.0) return right_value;
      [[fallthrough]];
    case Kind::FourierCosine:
    case Kind::FourierSine: {
      double s = 0.0;
      for (int k = 1; k <= dimension; ++k) {
        double mode = (kind == Kind::FourierSine) ? std::sin(2.0 * kPi * k * x)
                                                  : std::cos(2.0 * kPi * k * x);
        s += std::abs(mode) / ((k * kPi) * (k * kPi));
      }
      return base - std::abs(amplitude) * s;
    }
  }
  return base;
}

double ScatteringField::lower_bound() const {
  double fourier = base - std::abs(amplitude) * fourier_tail(dimension);
  switch (kind) {
    case Kind::Constant:
      return base;
    case Kind::FourierCosine:
    case Kind::FourierSine:
      return fourier;
    case Kind::PiecewiseFourier:
      return std::min(fourier, right_value);
  }
  return fourier;
}

double eval_sigma(const ScatteringField& field, double x, const ParamVector& z) {
  if (field.kind == ScatteringField::Kind::Constant) return field.base;
  if (static_cast<int>(z.size()) != field.dimension)
    throw ArgumentError("eval_sigma: parameter dimension mismatch");
  if (field.kind == ScatteringField::Kind::PiecewiseFourier && x > field.breakpoint && x < 1.0)
    return field.right_value;
  double s = 0.0;
  for (int k = 1; k <= field.dimension; ++k) {
    double mode = (field.kind == ScatteringField::Kind::FourierSine)
                      ? std::sin(2.0 * kPi * k * x)
                      : std::cos(2.0 * kPi * k * x);
    s += mode / ((k * kPi) * (k * kPi)) * z[k - 1];
  }
  return field.base + field.amplitude * s;
}

EpsilonField EpsilonField::constant(double eps) {
  if (!(eps >= 1e-12))
    throw ArgumentError("EpsilonField::constant: eps must be >= 1e-12");
  EpsilonField f;
  f.kind = Kind::Constant;
  f.value = eps;
  return f;
}

EpsilonField EpsilonField::tanh_profile() {
  EpsilonField f;
  f.kind = Kind::Tanh;
  f.floor = 1e-8;
  f.slope = 5.5;
  f.center = 0.5;
  return f;
}

double eval_epsilon(const EpsilonField& field, double x) {
  if (field.kind == EpsilonField::Kind::Constant) return field.value;
  double arg = field.slope * (x - field.center);
  double sq = field.floor + std::tanh(1.0 - arg) + std::tanh(1.0 + arg);
  if (!(sq > 0.0)) throw std::logic_error("eval_epsilon: non-positive radicand");
  return std::sqrt(sq);
}

double AffineInZ::eval(const ParamVector& z) const {
  double v = constant;
  for (std::size_t i = 0; i < coeffs.size() && i < z.size(); ++i) v += coeffs[i] * z[i];
  return v;
}

BoundarySpec BoundarySpec::inflow(AffineInZ left, AffineInZ right) {
  BoundarySpec b;
  b.kind = Kind::Inflow;
  b.inflow_left = std::move(left);
  b.inflow_right = std::move(right);
  return b;
}

InitialData InitialData::zero() { return {}; }

InitialData InitialData::double_gaussian(ScatteringField rho0, ScatteringField rho1) {
  InitialData d;
  d.kind = Kind::DoubleGaussianMaxwellian;
  d.rho0 = rho0;
  d.rho1 = rho1;
  return d;
}

InitialData InitialData::riemann_step(AffineInZ left) {
  InitialData d;
  d.kind = Kind::RiemannStep;
  d.step_left = std::move(left);
  return d;
}

InitialData InitialData::gaussian_pulse(double xi) {
  if (!(xi > 0.0)) throw ArgumentError("InitialData::gaussian_pulse: xi must be > 0");
  InitialData d;
  d.kind = Kind::GaussianPulse;
  d.pulse_xi = xi;
  return d;
}

double InitialData::f0(double x, double v, const ParamVector& z) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::DoubleGaussianMaxwellian: {
      double r0 = eval_sigma(rho0, x, z);
      double r1 = eval_sigma(rho1, x, z);
      double t0 = (5.0 + 2.0 * std::cos(2.0 * kPi * x)) / 20.0 * (1.0 + 0.6 * z.at(0));
      double t1 = 0.5 + 0.2 * std::cos(2.0 * kPi * x) * z.at(1);
      double a = (v - 0.5) / t0;
      double b = (v + 0.75) / t1;
      return r0 * std::exp(-a * a) + r1 * std::exp(-b * b);
    }
    case Kind::RiemannStep:
      return (x < 0.5) ? step_left.eval(z) : 0.0;
    case Kind::GaussianPulse: {
      double dx = x - 0.5;
      return 1.0 / (2.0 * kPi * pulse_xi) * std::exp(-dx * dx / (2.0 * pulse_xi));
    }
  }
  return 0.0;
}

}  // namespace bifi
