#ifndef BIFI_BIFIDELITY_HPP
#define BIFI_BIFIDELITY_HPP

#include <functional>
#include <limits>
#include <vector>

#include "fields.hpp"

namespace bifi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Ordered snapshot collection: one spatial QoI column per parameter sample,
// with the discrete inner product <u,w> = ip_weight * sum_i u_i w_i.
struct SnapshotSet {
  std::vector<std::vector<double>> columns;
  std::vector<ParamVector> params;
  double ip_weight = 1.0;  // dx of the originating grid

  int count() const { return static_cast<int>(columns.size()); }
  double inner(const std::vector<double>& u, const std::vector<double>& w) const;
  double norm(const std::vector<double>& u) const;
};

struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;
  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

// Packed lower-triangular Cholesky factor; solves use the leading k x k block.
struct LowerTriangular {
  int n = 0;
  std::vector<double> a;  // row i starts at i(i+1)/2

  void resize(int size);
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * (i + 1) / 2 + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * (i + 1) / 2 + j]; }
  // Solves (L L^T) x = b with the leading k x k block; b.size() >= k.
  std::vector<double> solve(const std::vector<double>& b, int k) const;
};

// Attempts a plain Cholesky factorization of symmetric g; false on a
// non-positive pivot.
bool cholesky(const Matrix& g, LowerTriangular& out);

// Gramian G_ij = <u_i, u_j>; computed on the upper triangle and mirrored so it
// is exactly symmetric.
Matrix gramian(const SnapshotSet& set);

// Greedy selection of the columns farthest from the span of the already
// selected ones, implemented as complete-pivoting Cholesky on the Gramian.
// pivots[k] is the squared distance of column indices[k] to the span of the
// previous selections; pivots are non-increasing. Stops after n_max points or
// when the next pivot drops below tol * pivots[0]. Ties pick the smallest
// candidate index.
struct SelectionResult {
  std::vector<int> indices;
  std::vector<double> pivots;
  LowerTriangular chol;    // factor of the Gramian restricted to the selection
  bool degenerate = false;  // set when the candidate set is all zero
};
SelectionResult select_points(const SnapshotSet& set, int n_max, double tol);

using SolveFn = std::function<std::vector<double>(const ParamVector&)>;

// Selected parameter points with the paired LF basis and HF snapshots. The LF
// inner product lives on the LF grid and the HF one on the HF grid; only the
// projection coefficients cross between fidelities.
struct BiFiSurrogate {
  std::vector<ParamVector> gamma;
  SnapshotSet lf_basis;
  std::vector<std::vector<double>> hf_snapshots;
  double hf_weight = 1.0;  // dx of the HF grid
  LowerTriangular lf_chol;
  LowerTriangular hf_chol;
  bool lf_jitter_applied = false;
  bool hf_jitter_applied = false;

  int size() const { return static_cast<int>(gamma.size()); }
  double hf_inner(const std::vector<double>& u, const std::vector<double>& w) const;
  double hf_norm(const std::vector<double>& u) const;
};

// Builds the surrogate from a selection over the LF candidate sweep plus the
// HF snapshots solved at the selected points (in selection order).
BiFiSurrogate make_surrogate(const SnapshotSet& lf_candidates, const SelectionResult& sel,
                             std::vector<std::vector<double>> hf_snapshots, double hf_weight);

// Galerkin coefficients of u against the first k LF basis columns:
// G^L c = f with f_a = <u, basis_a>. k = 0 (default) means the full basis.
std::vector<double> project_coeffs(const std::vector<double>& u, const BiFiSurrogate& s,
                                   int k = 0);

// Squared-difference form of the distance to the span, clamped at zero:
// d = sqrt(max(0, |u|^2 - |Pu|^2)) with |Pu|^2 = c . f.
double distance_to_span(double norm2_u, const std::vector<double>& coeffs,
                        const std::vector<double>& rhs);

// u^B(z) = sum_k c_k^L(z) u^H(z_k), coefficients from the LF projection.
std::vector<double> bifi_reconstruct(const ParamVector& z, const BiFiSurrogate& s,
                                     const SolveFn& lf, int k = 0);
std::vector<double> bifi_reconstruct_from_column(const std::vector<double>& u_lf,
                                                 const BiFiSurrogate& s, int k = 0);

// Accelerated mean: project the weighted LF mean once and apply the resulting
// coefficients to the HF snapshots. Weights must sum to 1 (probability
// measure).
std::vector<double> bifi_mean(const BiFiSurrogate& s, const std::vector<ParamVector>& nodes,
                              const std::vector<double>& weights, const SolveFn& lf, int k = 0);
std::vector<double> bifi_mean_from_columns(const BiFiSurrogate& s,
                                           const std::vector<std::vector<double>>& lf_columns,
                                           const std::vector<double>& weights, int k = 0);

// Model-similarity ratio (hf_dist/hf_norm) / (lf_dist/lf_norm). Returns +inf
// and sets *degenerate when the LF distance vanishes but the HF one does not;
// both vanishing gives 1 (identical relative distances).
double similarity_rs(double lf_dist, double lf_norm, double hf_dist, double hf_norm,
                     bool* degenerate = nullptr);

// In-plane error ratio at the (k+1)-th selected point, using the surrogate
// truncated to level k:
//   R_e = |P_{U^H} u^H(z_{k+1}) - u^B(z_{k+1})| / d^H(u^H(z_{k+1}), U^H).
// Returns +inf (stop-adding-samples signal) when the denominator vanishes.
double inplane_re(const BiFiSurrogate& s, int k, bool* degenerate = nullptr);

// Practical bound for the relative error at z*:
//   [d^L(u^L(z*), U^L) / |u^L(z*)|] * (c1 + c2 * Re_next).
double error_bound(const ParamVector& z_star, int k, const BiFiSurrogate& s, const SolveFn& lf,
                   double re_next, double c1 = 1.0, double c2 = 1.0);
double error_bound_from_column(const std::vector<double>& u_lf, int k, const BiFiSurrogate& s,
                               double re_next, double c1 = 1.0, double c2 = 1.0);
// Expectation form: max over a validation set of the LF relative distances.
double error_bound_max(const std::vector<double>& lf_rel_dists, double re_next, double c1 = 1.0,
                       double c2 = 1.0);

// LF relative distance d^L(u, U^L(gamma_k)) / |u| of one LF column.
double lf_relative_distance(const std::vector<double>& u_lf, const BiFiSurrogate& s, int k);

// Per-level diagnostics assembled by the experiment pipeline.
struct DiagnosticsRow {
  int k = 0;
  double true_err_mean = kInf;
  double bound = kInf;
  double rs_median = kInf;
  double rs_min = kInf;
  double rs_max = kInf;
  double re = kInf;
};

}  // namespace bifi

#endif  // BIFI_BIFIDELITY_HPP
