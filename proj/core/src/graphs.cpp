#include "gmc/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gmc {

std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

WeightedGraph::WeightedGraph(Index n_vertices) : WeightedGraph(n_vertices, {}) {}

WeightedGraph::WeightedGraph(Index n_vertices, std::vector<Edge> edges) : n_(n_vertices) {
  if (n_vertices < 0) throw std::invalid_argument("graph: negative vertex count");
  edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_) {
      std::ostringstream msg;
      msg << "graph: edge (" << e.u << "," << e.v << ") out of range for " << n_
          << " vertices";
      throw std::invalid_argument(msg.str());
    }
    if (e.u == e.v) {
      throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(e.u));
    }
    if (!std::isfinite(e.w) || e.w < 0.0) {
      throw std::invalid_argument("graph: invalid weight on edge (" + std::to_string(e.u) +
                                  "," + std::to_string(e.v) + ")");
    }
    if (e.w == 0.0) continue;
    if (e.u > e.v) std::swap(e.u, e.v);
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].u == edges_[k - 1].u && edges_[k].v == edges_[k - 1].v) {
      throw std::invalid_argument("graph: duplicate edge (" + std::to_string(edges_[k].u) +
                                  "," + std::to_string(edges_[k].v) + ")");
    }
  }
  BuildAdjacency();
}

void WeightedGraph::BuildAdjacency() {
  offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<Index> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[cursor[e.u]++] = {e.v, e.w};
    adjacency_[cursor[e.v]++] = {e.u, e.w};
  }
  degree_.assign(static_cast<std::size_t>(n_), 0.0);
  for (Index u = 0; u < n_; ++u) {
    auto first = adjacency_.begin() + offsets_[u];
    auto last = adjacency_.begin() + offsets_[u + 1];
    std::sort(first, last, [](const Neighbor& a, const Neighbor& b) {
      return a.vertex < b.vertex;
    });
    double d = 0.0;
    for (auto it = first; it != last; ++it) d += it->w;
    degree_[u] = d;
  }
}

std::span<const Neighbor> WeightedGraph::neighbors(Index u) const {
  return {adjacency_.data() + offsets_[u],
          static_cast<std::size_t>(offsets_[u + 1] - offsets_[u])};
}

double WeightedGraph::weight(Index u, Index v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) return 0.0;
  auto nbrs = neighbors(u);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                             [](const Neighbor& a, Index x) { return a.vertex < x; });
  return (it != nbrs.end() && it->vertex == v) ? it->w : 0.0;
}

double WeightedGraph::degree(Index u) const { return degree_[u]; }

Matrix LaplacianView::ToDense() const {
  const Index n = dim();
  Matrix l = Matrix::Zero(n, n);
  for (const Edge& e : graph_->edges()) {
    l(e.u, e.v) -= e.w;
    l(e.v, e.u) -= e.w;
    l(e.u, e.u) += e.w;
    l(e.v, e.v) += e.w;
  }
  return l;
}

namespace {

void CheckDims(const LaplacianView& laplacian, const Matrix& x, Side side, const char* op) {
  const Index need = side == Side::kLeft ? x.rows() : x.cols();
  if (laplacian.dim() != need) {
    std::ostringstream msg;
    msg << op << ": Laplacian is " << shape_string(laplacian.dim(), laplacian.dim())
        << " but matrix is " << shape_string(x.rows(), x.cols())
        << (side == Side::kLeft ? " (row graph must match rows)"
                                : " (column graph must match columns)");
    throw DimensionError(msg.str());
  }
}

}  // namespace

void laplacian_apply_into(const LaplacianView& laplacian, const Matrix& x, Side side,
                          Matrix& out) {
  CheckDims(laplacian, x, side, "laplacian_apply");
  const WeightedGraph& g = laplacian.graph();
  out.resize(x.rows(), x.cols());
  // (LX)_u = sum_v w_uv (x_u - x_v): exactly zero wherever neighbours agree.
  if (side == Side::kLeft) {
    for (Index j = 0; j < x.cols(); ++j) {
      const double* xc = x.col(j).data();
      double* oc = out.col(j).data();
      for (Index u = 0; u < g.n_vertices(); ++u) {
        double acc = 0.0;
        for (const Neighbor& nb : g.neighbors(u)) acc += nb.w * (xc[u] - xc[nb.vertex]);
        oc[u] = acc;
      }
    }
  } else {
    for (Index j = 0; j < x.cols(); ++j) {
      auto oc = out.col(j);
      oc.setZero();
      for (const Neighbor& nb : g.neighbors(j)) {
        oc.noalias() += nb.w * (x.col(j) - x.col(nb.vertex));
      }
    }
  }
}

Matrix laplacian_apply(const LaplacianView& laplacian, const Matrix& x, Side side) {
  Matrix out;
  laplacian_apply_into(laplacian, x, side, out);
  return out;
}

double dirichlet_energy(const LaplacianView& laplacian, const Matrix& x, Side side) {
  CheckDims(laplacian, x, side, "dirichlet_energy");
  Matrix lx;
  laplacian_apply_into(laplacian, x, side, lx);
  // Both trace forms reduce to the Frobenius inner product <X, LX> / <X, XL>.
  const double e = (x.array() * lx.array()).sum();
  return std::max(0.0, e);
}

WeightedGraph build_knn_graph(const Matrix& distances, Index k, KnnWeights weights) {
  const Index n = distances.rows();
  if (distances.cols() != n) {
    throw DimensionError("build_knn_graph: distance matrix is " +
                         shape_string(distances.rows(), distances.cols()) +
                         ", expected square");
  }
  if (k < 1) throw std::invalid_argument("build_knn_graph: k must be >= 1");
  if (k >= n) {
    throw std::invalid_argument("build_knn_graph: k = " + std::to_string(k) +
                                " must be smaller than the vertex count " +
                                std::to_string(n));
  }
  std::vector<std::vector<Index>> chosen(static_cast<std::size_t>(n));
  std::vector<Index> order;
  for (Index u = 0; u < n; ++u) {
    order.clear();
    for (Index v = 0; v < n; ++v) {
      if (v != u && std::isfinite(distances(u, v))) order.push_back(v);
    }
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end(), [&](Index a, Index b) {
                        const double da = distances(u, a);
                        const double db = distances(u, b);
                        return da != db ? da < db : a < b;
                      });
    chosen[u].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  }

  double sigma2 = 1.0;
  if (weights == KnnWeights::kKernel) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Index u = 0; u < n; ++u) {
      for (Index v : chosen[u]) {
        sum += distances(u, v);
        ++count;
      }
    }
    const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
    sigma2 = mean > 0.0 ? mean * mean : 1.0;
  }

  std::vector<Edge> edges;
  for (Index u = 0; u < n; ++u) {
    for (Index v : chosen[u]) {
      Index a = std::min(u, v), b = std::max(u, v);
      double w = 1.0;
      if (weights == KnnWeights::kKernel) {
        const double d = distances(a, b);
        w = std::exp(-d * d / sigma2);
      }
      edges.push_back({a, b, w});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.u != y.u ? x.u < y.u : x.v < y.v;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& x, const Edge& y) { return x.u == y.u && x.v == y.v; }),
              edges.end());
  return WeightedGraph(n, std::move(edges));
}

double default_kernel_alpha(double epsilon, double d_min) {
  const double span = epsilon - d_min;
  return span * span / std::log(100.0);
}

WeightedGraph build_epsilon_graph(const Matrix& distances, double epsilon, double alpha,
                                  double d_min) {
  const Index n = distances.rows();
  if (distances.cols() != n) {
    throw DimensionError("build_epsilon_graph: distance matrix is " +
                         shape_string(distances.rows(), distances.cols()) +
                         ", expected square");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("build_epsilon_graph: alpha must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_epsilon_graph: epsilon must be > 0");
  std::vector<Edge> edges;
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      const double d = distances(u, v);
      if (!std::isfinite(d) || !(d < epsilon)) continue;
      const double delta = d - d_min;
      const double w = std::exp(-delta * delta / alpha);
      if (w > 0.0) edges.push_back({u, v, w});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

}  // namespace gmc
