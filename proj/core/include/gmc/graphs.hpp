#pragma once

#include <span>
#include <vector>

#include "gmc/types.hpp"

namespace gmc {

struct Edge {
  Index u = 0;
  Index v = 0;
  double w = 1.0;
};

struct Neighbor {
  Index vertex = 0;
  double w = 0.0;
};

// Undirected graph with nonnegative edge weights over vertices 0..n-1.
//
// Edges are stored once per unordered pair in canonical form (u < v, sorted)
// and mirrored into a compressed per-vertex adjacency. Zero-weight edges are
// dropped on construction. Immutable once built.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(Index n_vertices);
  // Rejects out-of-range endpoints, self-loops, negative or non-finite
  // weights and repeated unordered pairs.
  WeightedGraph(Index n_vertices, std::vector<Edge> edges);

  Index n_vertices() const { return n_; }
  Index n_edges() const { return static_cast<Index>(edges_.size()); }

  // Canonical edge list, sorted by (u, v) with u < v.
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(Index u) const;

  // Weight of the unordered pair {u, v}; 0 when absent.
  double weight(Index u, Index v) const;
  bool has_edge(Index u, Index v) const { return weight(u, v) > 0.0; }

  double degree(Index u) const;
  const std::vector<double>& degrees() const { return degree_; }

 private:
  void BuildAdjacency();

  Index n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Index> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> degree_;
};

enum class Side {
  kLeft,   // row graph: L * X, L is m x m
  kRight,  // column graph: X * L, L is n x n
};

// Non-owning view of the combinatorial Laplacian L = D - W of a graph. The
// graph must outlive the view. L is never formed explicitly.
class LaplacianView {
 public:
  explicit LaplacianView(const WeightedGraph& graph) : graph_(&graph) {}

  const WeightedGraph& graph() const { return *graph_; }
  Index dim() const { return graph_->n_vertices(); }
  double degree(Index u) const { return graph_->degree(u); }

  // Dense copy of L, for tests and small oracles only.
  Matrix ToDense() const;

 private:
  const WeightedGraph* graph_;
};

// L*X (kLeft) or X*L (kRight). Cost is O(|E| * other dimension).
Matrix laplacian_apply(const LaplacianView& laplacian, const Matrix& x, Side side);
void laplacian_apply_into(const LaplacianView& laplacian, const Matrix& x, Side side,
                          Matrix& out);

// tr(X^T L X) for kLeft, tr(X L X^T) for kRight; equal to the sum over
// undirected edges of w * ||x_u - x_v||^2 on the rows (kLeft) or columns
// (kRight) of X.
double dirichlet_energy(const LaplacianView& laplacian, const Matrix& x, Side side);

enum class KnnWeights { kBinary, kKernel };

// Symmetric k-nearest-neighbour graph from a pairwise distance matrix. Each
// vertex links to its k nearest other vertices (ties broken toward the lower
// index); the result is the union of those directed relations. Non-finite
// distances mark pairs that may never be linked. kKernel weights use
// exp(-d^2 / sigma^2) with sigma the mean selected neighbour distance.
WeightedGraph build_knn_graph(const Matrix& distances, Index k,
                              KnnWeights weights = KnnWeights::kBinary);

// Default Gaussian bandwidth: kernel decays to 0.01 at d = epsilon.
double default_kernel_alpha(double epsilon, double d_min);

// Edge (i, j) iff d_ij < epsilon, weighted exp(-(d_ij - d_min)^2 / alpha).
// Non-finite distances never produce an edge.
WeightedGraph build_epsilon_graph(const Matrix& distances, double epsilon, double alpha,
                                  double d_min);

}  // namespace gmc
