#ifndef BIFI_QUADRATURE_HPP
#define BIFI_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace bifi {

// Quadrature rule on the half velocity interval (0,1). Weights sum to 1, so
// weighted sums of nodal data are velocity averages.
struct VelocityQuadrature {
  std::vector<double> nodes;    // strictly increasing, all in (0,1)
  std::vector<double> weights;  // positive, sum 1
  int size() const { return static_cast<int>(nodes.size()); }
};

// M-point Gauss-Legendre rule mapped affinely from (-1,1) to (0,1).
VelocityQuadrature gauss_legendre_unit(int m);

// 1D Clenshaw-Curtis rule on [-1,1]. Level 0 is the single node 0 with
// weight 2; level l >= 1 has 2^l + 1 nodes cos(j*pi/2^l). Rules are nested.
struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule1d clenshaw_curtis_1d(int level);

// Smolyak sparse tensorization of the nested Clenshaw-Curtis family on
// [-1,1]^d. Duplicate nodes are merged with weights summed; nodes are in
// lexicographic order. Weights may be negative and sum to 2^d.
struct SparseGrid {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
  int level = 0;
  int dimension = 0;
  std::size_t size() const { return nodes.size(); }
};
SparseGrid smolyak_grid(int dimension, int level);

}  // namespace bifi

#endif  // BIFI_QUADRATURE_HPP
