#pragma once

#include <random>
#include <vector>

#include "gmc/graphs.hpp"
#include "gmc/observations.hpp"

namespace gmc::testing {

inline Matrix RandomMatrix(Index rows, Index cols, std::mt19937_64& rng, double lo = -1.0,
                           double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

// Each unordered pair present with probability p, weight uniform in (0.1, 2).
inline WeightedGraph RandomGraph(Index n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  std::vector<Edge> edges;
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      if (keep(rng)) edges.push_back({u, v, w(rng)});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

// Random observation pattern with the given probability per cell.
inline SparseObservations RandomObservations(const Matrix& values, double p,
                                             std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::vector<Entry> entries;
  for (Index j = 0; j < values.cols(); ++j) {
    for (Index i = 0; i < values.rows(); ++i) {
      if (keep(rng)) entries.push_back({i, j, values(i, j)});
    }
  }
  return SparseObservations(values.rows(), values.cols(), std::move(entries));
}

// D - W assembled from the edge list, independent of LaplacianView.
inline Matrix DenseLaplacian(const WeightedGraph& g) {
  const Index n = g.n_vertices();
  Matrix l = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.u, e.v) -= e.w;
    l(e.v, e.u) -= e.w;
    l(e.u, e.u) += e.w;
    l(e.v, e.v) += e.w;
  }
  return l;
}

inline Matrix DenseMask(const SparseObservations& obs) {
  Matrix a = Matrix::Zero(obs.rows(), obs.cols());
  for (const Entry& e : obs.entries()) a(e.i, e.j) = 1.0;
  return a;
}

inline Matrix DenseValues(const SparseObservations& obs) {
  Matrix m = Matrix::Zero(obs.rows(), obs.cols());
  for (const Entry& e : obs.entries()) m(e.i, e.j) = e.value;
  return m;
}

// Column-stacked operator of Y -> A o Y + g_r L_r Y + g_c Y L_c + rho Y,
// built with vec(A X B) = (B^T kron A) vec(X).
inline Matrix KroneckerSystem(const Matrix& mask, const Matrix& lr, const Matrix& lc, double g_r,
                              double g_c, double rho) {
  const Index m = mask.rows();
  const Index n = mask.cols();
  const Index mn = m * n;
  Matrix big = Matrix::Zero(mn, mn);
  // I_n kron L_r
  for (Index b = 0; b < n; ++b) big.block(b * m, b * m, m, m) += g_r * lr;
  // L_c^T kron I_m
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      for (Index i = 0; i < m; ++i) big(a * m + i, b * m + i) += g_c * lc(b, a);
    }
  }
  for (Index k = 0; k < mn; ++k) big(k, k) += mask.data()[k] + rho;
  return big;
}

inline double RelDiff(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace gmc::testing
