#include "bifidelity.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace bifi {

double SnapshotSet::inner(const std::vector<double>& u, const std::vector<double>& w) const {
  if (u.size() != w.size()) throw ArgumentError("SnapshotSet::inner: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * w[i];
  return ip_weight * s;
}

double SnapshotSet::norm(const std::vector<double>& u) const {
  return std::sqrt(std::max(0.0, inner(u, u)));
}

void LowerTriangular::resize(int size) {
  n = size;
  a.assign(static_cast<std::size_t>(size) * (size + 1) / 2, 0.0);
}

std::vector<double> LowerTriangular::solve(const std::vector<double>& b, int k) const {
  if (k <= 0 || k > n) throw ArgumentError("LowerTriangular::solve: bad block size");
  std::vector<double> y(k);
  for (int i = 0; i < k; ++i) {
    double s = b[i];
    for (int j = 0; j < i; ++j) s -= at(i, j) * y[j];
    y[i] = s / at(i, i);
  }
  for (int i = k - 1; i >= 0; --i) {
    double s = y[i];
    for (int j = i + 1; j < k; ++j) s -= at(j, i) * y[j];
    y[i] = s / at(i, i);
  }
  return y;
}

bool cholesky(const Matrix& g, LowerTriangular& out) {
  out.resize(g.rows);
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= out.at(i, k) * out.at(j, k);
      if (i == j) {
        if (!(s > 0.0)) return false;
        out.at(i, i) = std::sqrt(s);
      } else {
        out.at(i, j) = s / out.at(j, j);
      }
    }
  }
  return true;
}

Matrix gramian(const SnapshotSet& set) {
  if (set.count() == 0) throw ArgumentError("gramian: empty snapshot set");
  int k = set.count();
  Matrix g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      double v = set.inner(set.columns[i], set.columns[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

SelectionResult select_points(const SnapshotSet& set, int n_max, double tol) {
  const int k_total = set.count();
  if (n_max < 1 || n_max > k_total)
    throw ArgumentError("select_points: n_max must be in [1, candidate count]");
  Matrix g = gramian(set);

  std::vector<double> diag(k_total);
  for (int i = 0; i < k_total; ++i) diag[i] = g(i, i);
  std::vector<char> taken(k_total, 0);
  Matrix l(k_total, n_max);  // partial factor, one column per selection step

  SelectionResult res;
  for (int step = 0; step < n_max; ++step) {
    int pivot = -1;
    double best = 0.0;
    for (int i = 0; i < k_total; ++i) {
      if (taken[i]) continue;
      if (pivot < 0 || diag[i] > best) {  // strict >: ties keep the smallest index
        best = diag[i];
        pivot = i;
      }
    }
    if (pivot < 0 || !(best > 0.0)) {
      if (step == 0) res.degenerate = true;
      break;
    }
    if (step > 0 && best < tol * res.pivots.front()) break;
    res.indices.push_back(pivot);
    res.pivots.push_back(best);
    taken[pivot] = 1;
    double root = std::sqrt(best);
    l(pivot, step) = root;
    for (int i = 0; i < k_total; ++i) {
      if (taken[i]) continue;
      double s = g(i, pivot);
      for (int j = 0; j < step; ++j) s -= l(i, j) * l(pivot, j);
      double lik = s / root;
      l(i, step) = lik;
      diag[i] -= lik * lik;
    }
  }

  int n = static_cast<int>(res.indices.size());
  res.chol.resize(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b <= a; ++b) res.chol.at(a, b) = l(res.indices[a], b);
  return res;
}

double BiFiSurrogate::hf_inner(const std::vector<double>& u, const std::vector<double>& w) const {
  if (u.size() != w.size()) throw ArgumentError("BiFiSurrogate::hf_inner: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * w[i];
  return hf_weight * s;
}

double BiFiSurrogate::hf_norm(const std::vector<double>& u) const {
  return std::sqrt(std::max(0.0, hf_inner(u, u)));
}

namespace {

// Plain Cholesky of g; on failure adds 1e-14 * trace / n to the diagonal once.
bool factor_with_jitter(Matrix g, LowerTriangular& out, bool& jitter_flag) {
  if (cholesky(g, out)) return true;
  double trace = 0.0;
  for (int i = 0; i < g.rows; ++i) trace += g(i, i);
  double jitter = 1e-14 * trace / g.rows;
  for (int i = 0; i < g.rows; ++i) g(i, i) += jitter;
  jitter_flag = true;
  return cholesky(g, out);
}

}  // namespace

BiFiSurrogate make_surrogate(const SnapshotSet& lf_candidates, const SelectionResult& sel,
                             std::vector<std::vector<double>> hf_snapshots, double hf_weight) {
  if (sel.indices.empty())
    throw ArgumentError("make_surrogate: empty selection");
  if (hf_snapshots.size() != sel.indices.size())
    throw ArgumentError("make_surrogate: HF snapshot count must match the selection");
  BiFiSurrogate s;
  s.gamma.reserve(sel.indices.size());
  for (int idx : sel.indices) {
    s.gamma.push_back(lf_candidates.params.at(idx));
    s.lf_basis.columns.push_back(lf_candidates.columns.at(idx));
    s.lf_basis.params.push_back(lf_candidates.params.at(idx));
  }
  s.lf_basis.ip_weight = lf_candidates.ip_weight;
  s.hf_snapshots = std::move(hf_snapshots);
  s.hf_weight = hf_weight;
  s.lf_chol = sel.chol;

  SnapshotSet hf_set;
  hf_set.columns = s.hf_snapshots;
  hf_set.params = s.gamma;
  hf_set.ip_weight = hf_weight;
  if (!factor_with_jitter(gramian(hf_set), s.hf_chol, s.hf_jitter_applied))
    throw ArgumentError("make_surrogate: HF Gramian is numerically singular");
  return s;
}

std::vector<double> project_coeffs(const std::vector<double>& u, const BiFiSurrogate& s,
                                   int k) {
  if (k == 0) k = s.size();
  if (k < 1 || k > s.size()) throw ArgumentError("project_coeffs: bad truncation level");
  std::vector<double> f(k);
  for (int a = 0; a < k; ++a) f[a] = s.lf_basis.inner(u, s.lf_basis.columns[a]);
  return s.lf_chol.solve(f, k);
}

double distance_to_span(double norm2_u, const std::vector<double>& coeffs,
                        const std::vector<double>& rhs) {
  double proj2 = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) proj2 += coeffs[i] * rhs[i];
  return std::sqrt(std::max(0.0, norm2_u - proj2));
}

std::vector<double> bifi_reconstruct_from_column(const std::vector<double>& u_lf,
                                                 const BiFiSurrogate& s, int k) {
  if (k == 0) k = s.size();
  std::vector<double> c = project_coeffs(u_lf, s, k);
  std::vector<double> out(s.hf_snapshots.front().size(), 0.0);
  for (int a = 0; a < k; ++a) {
    const std::vector<double>& col = s.hf_snapshots[a];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[a] * col[i];
  }
  return out;
}

std::vector<double> bifi_reconstruct(const ParamVector& z, const BiFiSurrogate& s,
                                     const SolveFn& lf, int k) {
  return bifi_reconstruct_from_column(lf(z), s, k);
}

std::vector<double> bifi_mean_from_columns(const BiFiSurrogate& s,
                                           const std::vector<std::vector<double>>& lf_columns,
                                           const std::vector<double>& weights, int k) {
  if (lf_columns.size() != weights.size())
    throw ArgumentError("bifi_mean: node/weight count mismatch");
  if (lf_columns.empty()) throw ArgumentError("bifi_mean: empty node set");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-8)
    throw ArgumentError("bifi_mean: weights must sum to 1 (probability measure)");
  std::vector<double> mu_lf(lf_columns.front().size(), 0.0);
  for (std::size_t q = 0; q < lf_columns.size(); ++q)
    for (std::size_t i = 0; i < mu_lf.size(); ++i) mu_lf[i] += weights[q] * lf_columns[q][i];
  return bifi_reconstruct_from_column(mu_lf, s, k);
}

std::vector<double> bifi_mean(const BiFiSurrogate& s, const std::vector<ParamVector>& nodes,
                              const std::vector<double>& weights, const SolveFn& lf, int k) {
  std::vector<std::vector<double>> cols(nodes.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) cols[q] = lf(nodes[q]);
  return bifi_mean_from_columns(s, cols, weights, k);
}

double similarity_rs(double lf_dist, double lf_norm, double hf_dist, double hf_norm,
                     bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (!(lf_norm > 0.0) || !(hf_norm > 0.0))
    throw ArgumentError("similarity_rs: norms must be positive");
  double rel_l = lf_dist / lf_norm;
  double rel_h = hf_dist / hf_norm;
  if (rel_l == 0.0) {
    if (rel_h == 0.0) return 1.0;
    if (degenerate) *degenerate = true;
    return kInf;
  }
  return rel_h / rel_l;
}

double inplane_re(const BiFiSurrogate& s, int k, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (k < 1 || k + 1 > s.size())
    throw ArgumentError("inplane_re: need the (k+1)-th selected point");
  const std::vector<double>& u_h = s.hf_snapshots[k];
  const std::vector<double>& u_l = s.lf_basis.columns[k];

  std::vector<double> f_h(k);
  for (int a = 0; a < k; ++a) f_h[a] = s.hf_inner(u_h, s.hf_snapshots[a]);
  std::vector<double> c_h = s.hf_chol.solve(f_h, k);
  std::vector<double> c_l = project_coeffs(u_l, s, k);

  std::vector<double> diff(u_h.size(), 0.0);
  for (int a = 0; a < k; ++a) {
    double d = c_h[a] - c_l[a];
    const std::vector<double>& col = s.hf_snapshots[a];
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] += d * col[i];
  }
  double num = s.hf_norm(diff);
  double den = distance_to_span(s.hf_inner(u_h, u_h), c_h, f_h);
  if (den == 0.0) {
    if (degenerate) *degenerate = true;
    return kInf;
  }
  return num / den;
}

double lf_relative_distance(const std::vector<double>& u_lf, const BiFiSurrogate& s, int k) {
  if (k == 0) k = s.size();
  double norm2 = s.lf_basis.inner(u_lf, u_lf);
  if (!(norm2 > 0.0)) throw ArgumentError("lf_relative_distance: degenerate sample");
  std::vector<double> f(k);
  for (int a = 0; a < k; ++a) f[a] = s.lf_basis.inner(u_lf, s.lf_basis.columns[a]);
  std::vector<double> c = s.lf_chol.solve(f, k);
  return distance_to_span(norm2, c, f) / std::sqrt(norm2);
}

double error_bound_from_column(const std::vector<double>& u_lf, int k, const BiFiSurrogate& s,
                               double re_next, double c1, double c2) {
  if (!std::isfinite(re_next)) return kInf;  // stop-adding-samples sentinel
  return lf_relative_distance(u_lf, s, k) * (c1 + c2 * re_next);
}

double error_bound(const ParamVector& z_star, int k, const BiFiSurrogate& s, const SolveFn& lf,
                   double re_next, double c1, double c2) {
  return error_bound_from_column(lf(z_star), k, s, re_next, c1, c2);
}

double error_bound_max(const std::vector<double>& lf_rel_dists, double re_next, double c1,
                       double c2) {
  if (!std::isfinite(re_next)) return kInf;
  double worst = 0.0;
  for (double d : lf_rel_dists) worst = std::max(worst, d);
  return worst * (c1 + c2 * re_next);
}

}  // namespace bifi
