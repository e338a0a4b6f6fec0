#pragma once

#include <optional>
#include <vector>

#include "gmc/graphs.hpp"
#include "gmc/observations.hpp"

namespace gmc {

// Side-information ratings: rows are the entities a graph is built over,
// columns are the feature items they rated.
class FeatureBlock {
 public:
  explicit FeatureBlock(SparseObservations observations);

  Index n_entities() const { return observations_.rows(); }
  const SparseObservations& observations() const { return observations_; }
  // Ratings of one entity as (item, value), sorted by item.
  const std::vector<std::pair<Index, double>>& ratings(Index entity) const {
    return per_entity_[entity];
  }

 private:
  SparseObservations observations_;
  std::vector<std::vector<std::pair<Index, double>>> per_entity_;
};

struct CommonSupportDistance {
  double distance = 0.0;
  Index support = 0;
};

// RMS difference of two entities' ratings over their common items;
// nullopt when fewer than min_common items are shared.
std::optional<double> common_support_distance(const FeatureBlock& f, Index i, Index j,
                                              Index min_common);
CommonSupportDistance common_support_stats(const FeatureBlock& f, Index i, Index j);

struct PairwiseDistances {
  Matrix dist;                   // NaN marks an undefined pair
  Eigen::MatrixXi support_count;
  Index n_entities() const { return dist.rows(); }
  bool defined(Index i, Index j) const;
};

PairwiseDistances pairwise_distances(const FeatureBlock& f, Index min_common);

struct SideGraphConfig {
  double epsilon = 1.1;
  std::optional<double> alpha;  // default: kernel reaches 0.01 at epsilon
  Index min_common = 3;
  // Ignore exact zero distances when locating d_min.
  bool exclude_zero_dmin = false;
};

struct SideGraphSummary {
  double d_min = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  Index defined_pairs = 0;
  Index edge_count = 0;
  std::vector<std::pair<double, double>> quantiles;  // (q, distance)
};

// epsilon-neighbourhood graph with Gaussian kernel over common-support
// distances. Pairs with undefined distance never get an edge.
WeightedGraph build_side_graph(const FeatureBlock& f, const SideGraphConfig& cfg,
                               SideGraphSummary* summary = nullptr);

// Same, starting from precomputed distances.
WeightedGraph build_side_graph(const PairwiseDistances& d, const SideGraphConfig& cfg,
                               SideGraphSummary* summary = nullptr);

}  // namespace gmc
