#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "errors.hpp"

namespace bifi {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Legendre P_m and its derivative at x, by the three-term recurrence.
void legendre_eval(int m, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= m; ++k) {
    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = (m == 0) ? 1.0 : p1;
  dp = (m == 0) ? 0.0 : m * (x * p1 - p0) / (x * x - 1.0);
}

// Canonical node value for the Clenshaw-Curtis point cos(j*pi/2^l). The
// fraction j/2^l is reduced first so the same geometric point evaluates to
// bit-identical doubles at every level, which makes nested-grid merging exact.
double cc_node(long j, long n) {
  while (j % 2 == 0 && n > 1) {
    j /= 2;
    n /= 2;
  }
  if (j == 0) return 1.0;
  if (j == n) return -1.0;
  if (2 * j == n) return 0.0;
  return std::cos(kPi * static_cast<double>(j) / static_cast<double>(n));
}

double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
  return v;
}

}  // namespace

VelocityQuadrature gauss_legendre_unit(int m) {
  if (m < 1) throw ArgumentError("gauss_legendre_unit: need at least one node");
  std::vector<double> x(m), w(m);
  // Roots of P_m on (-1,1) by Newton iteration, exploiting symmetry.
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double xi = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_eval(m, xi, p, dp);
      double delta = p / dp;
      xi -= delta;
      if (std::abs(delta) < 1e-15) break;
    }
    legendre_eval(m, xi, p, dp);
    double wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
    x[i] = -xi;  // Newton guesses descend from +1; store ascending
    x[m - 1 - i] = xi;
    w[i] = wi;
    w[m - 1 - i] = wi;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
  VelocityQuadrature q;
  q.nodes.resize(m);
  q.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    q.nodes[i] = 0.5 * (x[i] + 1.0);  // (-1,1) -> (0,1)
    q.weights[i] = 0.5 * w[i];        // total weight 2 -> 1
  }
  return q;
}

Rule1d clenshaw_curtis_1d(int level) {
  if (level < 0) throw ArgumentError("clenshaw_curtis_1d: level must be >= 0");
  Rule1d rule;
  if (level == 0) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  long n = 1L << level;  // n+1 nodes
  rule.nodes.resize(n + 1);
  rule.weights.resize(n + 1);
  for (long j = 0; j <= n; ++j) {
    // Ascending order: j = n..0 maps to cos(pi) .. cos(0).
    rule.nodes[j] = cc_node(n - j, n);
    double theta = kPi * static_cast<double>(n - j) / static_cast<double>(n);
    // Exact integrals of even Chebyshev polynomials give the cosine-sum
    // weight formula; endpoints carry the usual factor 1/2.
    double s = 1.0;
    for (long k = 2; k <= n - 2; k += 2)
      s += 2.0 / (1.0 - static_cast<double>(k) * k) * std::cos(k * theta);
    s += std::cos(n * theta) / (1.0 - static_cast<double>(n) * n);
    double cj = (j == 0 || j == n) ? 0.5 : 1.0;
    rule.weights[j] = cj * 2.0 / static_cast<double>(n) * s;
  }
  return rule;
}

SparseGrid smolyak_grid(int dimension, int level) {
  if (dimension < 1) throw ArgumentError("smolyak_grid: dimension must be >= 1");
  if (level < 0) throw ArgumentError("smolyak_grid: level must be >= 0");
  const int d = dimension;
  const int q = d + level;

  // 1D rules indexed from 1: rule i is Clenshaw-Curtis level i-1.
  std::vector<Rule1d> rules;
  for (int i = 1; i <= q - d + 1; ++i) rules.push_back(clenshaw_curtis_1d(i - 1));

  // Canonical node values make duplicates bit-identical, so map keys merge
  // repeated points exactly (well within the 1e-12 coordinate tolerance).
  std::map<std::vector<double>, double> acc;
  std::vector<int> idx(d, 1);

  auto add_tensor = [&](const std::vector<int>& multi, double coeff) {
    std::vector<std::size_t> pos(d, 0);
    std::vector<double> node(d);
    for (;;) {
      double w = coeff;
      for (int k = 0; k < d; ++k) {
        const Rule1d& r = rules[multi[k] - 1];
        node[k] = r.nodes[pos[k]];
        w *= r.weights[pos[k]];
      }
      acc[node] += w;
      int k = d - 1;
      while (k >= 0) {
        if (++pos[k] < rules[multi[k] - 1].nodes.size()) break;
        pos[k] = 0;
        --k;
      }
      if (k < 0) break;
    }
  };

  // Isotropic Smolyak combination over q-d+1 <= |i| <= q.
  std::vector<int> multi(d, 1);
  auto enumerate = [&](auto&& self, int k, int remaining_min, int sum) -> void {
    if (k == d) {
      if (sum >= q - d + 1 && sum <= q) {
        int excess = q - sum;
        double coeff = ((excess % 2 == 0) ? 1.0 : -1.0) * binomial(d - 1, excess);
        add_tensor(multi, coeff);
      }
      return;
    }
    (void)remaining_min;
    for (int i = 1; sum + i + (d - k - 1) <= q; ++i) {
      multi[k] = i;
      self(self, k + 1, 0, sum + i);
    }
  };
  enumerate(enumerate, 0, 0, 0);

  SparseGrid grid;
  grid.level = level;
  grid.dimension = d;
  grid.nodes.reserve(acc.size());
  grid.weights.reserve(acc.size());
  for (const auto& [node, weight] : acc) {
    grid.nodes.push_back(node);
    grid.weights.push_back(weight);
  }
  return grid;
}

}  // namespace bifi
