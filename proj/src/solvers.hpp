#ifndef BIFI_SOLVERS_HPP
#define BIFI_SOLVERS_HPP

#include <vector>

#include "fields.hpp"
#include "quadrature.hpp"

namespace bifi {

// Uniform cell-centered grid on [0,1].
struct SpatialGrid {
  int n = 0;
  double dx = 0.0;
  BoundarySpec boundary;

  static SpatialGrid uniform(int cells, BoundarySpec bc = BoundarySpec::periodic());
  double center(int i) const { return (i + 0.5) * dx; }
};

// Even/odd parity fields on cells x velocity nodes. Storage is velocity-major:
// row m holds the spatial profile for velocity node m.
struct KineticState {
  int nx = 0;
  int nv = 0;
  std::vector<double> r;  // even parity
  std::vector<double> j;  // scaled odd parity
  double t = 0.0;

  double& r_at(int i, int m) { return r[static_cast<std::size_t>(m) * nx + i]; }
  double& j_at(int i, int m) { return j[static_cast<std::size_t>(m) * nx + i]; }
  double r_at(int i, int m) const { return r[static_cast<std::size_t>(m) * nx + i]; }
  double j_at(int i, int m) const { return j[static_cast<std::size_t>(m) * nx + i]; }
};

// Density / scaled-flux pair of the two-speed model.
struct MacroState {
  std::vector<double> rho;
  std::vector<double> s;
  double t = 0.0;
};

struct SolverConfig {
  SpatialGrid grid;
  double dt = 0.0;
  double t_final = 0.0;
  EpsilonField eps;
  ScatteringField sigma;
  VelocityQuadrature vq;        // HF and parity-initialization only
  double lf_sigma_scale = 1.0;  // LF effective scattering = scale * sigma
};

// Parity initialization from the preset density f0:
//   r(0,x,v) = [f0(x,v) + f0(x,-v)]/2,  j(0,x,v) = [f0(x,v) - f0(x,-v)]/(2 eps(x)).
KineticState hf_initial_state(const InitialData& preset, const SpatialGrid& grid,
                              const VelocityQuadrature& vq, const ParamVector& z,
                              const EpsilonField& eps);

// Macroscopic initialization consistent with the parity fields:
//   rho(0,x) = int_0^1 r dv,  s(0,x) = 2 int_0^1 v j dv.
MacroState lf_initial_state(const InitialData& preset, const SpatialGrid& grid,
                            const VelocityQuadrature& vq, const ParamVector& z,
                            const EpsilonField& eps);

// Velocity average rbar_i = sum_m w_m r_{i,m}.
std::vector<double> compute_rbar(const KineticState& state, const VelocityQuadrature& vq);

// Time-step limits for the split relaxation/transport scheme, uniform in eps.
// dt_max = safety * min(dx / max wave speed, 2 dx^2 / max limiting diffusivity),
// with the diffusivity bounded via the certified lower bound of sigma over z.
struct StabilityReport {
  double dt = 0.0;
  double dt_max = 0.0;
  double hyperbolic_limit = 0.0;
  double diffusive_limit = 0.0;
  double safety_factor = 0.9;
  double usage() const { return dt / dt_max; }
  bool ok() const { return dt > 0.0 && dt <= dt_max; }
};
StabilityReport hf_stability(const SolverConfig& cfg);
StabilityReport lf_stability(const SolverConfig& cfg);

// One split step (relaxation, then upwind transport). The stage functions are
// exposed separately so the stage algebra can be checked in isolation.
void hf_relaxation_stage(KineticState& state, const SolverConfig& cfg, const ParamVector& z,
                         double dt);
void hf_transport_stage(KineticState& state, const SolverConfig& cfg, const ParamVector& z,
                        double dt);
KineticState hf_step(const KineticState& state, const SolverConfig& cfg, const ParamVector& z);

void lf_relaxation_stage(MacroState& state, const SolverConfig& cfg, const ParamVector& z,
                         double dt);
void lf_transport_stage(MacroState& state, const SolverConfig& cfg, const ParamVector& z,
                        double dt);
MacroState lf_step(const MacroState& state, const SolverConfig& cfg, const ParamVector& z);

// Integrate to cfg.t_final and return the spatial quantity of interest
// (rbar for the parity system, rho for the two-speed model).
std::vector<double> hf_solve(const SolverConfig& cfg, const ParamVector& z,
                             const InitialData& preset);
std::vector<double> lf_solve(const SolverConfig& cfg, const ParamVector& z,
                             const InitialData& preset);

// Explicit finite-volume heat equation d_t rho = d_x (D d_x rho); verification
// oracle for the diffusive limit. LTE_third: D = 1/(3 sigma). GT_full:
// D = 1/(lf_sigma_scale * sigma).
enum class DiffusionKind { LTE_third, GT_full };
std::vector<double> diffusion_solve(const SolverConfig& cfg, const ParamVector& z,
                                    const InitialData& preset, DiffusionKind kind);

}  // namespace bifi

#endif  // BIFI_SOLVERS_HPP
