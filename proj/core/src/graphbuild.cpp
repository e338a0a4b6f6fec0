#include "gmc/graphbuild.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmc {

FeatureBlock::FeatureBlock(SparseObservations observations)
    : observations_(std::move(observations)),
      per_entity_(static_cast<std::size_t>(observations_.rows())) {
  for (const Entry& e : observations_.entries()) per_entity_[e.i].emplace_back(e.j, e.value);
  for (auto& list : per_entity_) std::sort(list.begin(), list.end());
}

CommonSupportDistance common_support_stats(const FeatureBlock& f, Index i, Index j) {
  const auto& a = f.ratings(i);
  const auto& b = f.ratings(j);
  CommonSupportDistance out;
  double acc = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      const double d = ia->second - ib->second;
      acc += d * d;
      ++out.support;
      ++ia;
      ++ib;
    }
  }
  out.distance = out.support > 0 ? std::sqrt(acc / static_cast<double>(out.support)) : 0.0;
  return out;
}

std::optional<double> common_support_distance(const FeatureBlock& f, Index i, Index j,
                                              Index min_common) {
  const CommonSupportDistance s = common_support_stats(f, i, j);
  if (s.support == 0 || s.support < min_common) return std::nullopt;
  return s.distance;
}

bool PairwiseDistances::defined(Index i, Index j) const { return !std::isnan(dist(i, j)); }

PairwiseDistances pairwise_distances(const FeatureBlock& f, Index min_common) {
  const Index n = f.n_entities();
  PairwiseDistances out;
  out.dist = Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  out.support_count = Eigen::MatrixXi::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    out.dist(i, i) = 0.0;
    out.support_count(i, i) = static_cast<int>(f.ratings(i).size());
    for (Index j = i + 1; j < n; ++j) {
      const CommonSupportDistance s = common_support_stats(f, i, j);
      out.support_count(i, j) = out.support_count(j, i) = static_cast<int>(s.support);
      if (s.support > 0 && s.support >= min_common) out.dist(i, j) = out.dist(j, i) = s.distance;
    }
  }
  return out;
}

namespace {

double Quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - t) + sorted[hi] * t;
}

}  // namespace

WeightedGraph build_side_graph(const PairwiseDistances& d, const SideGraphConfig& cfg,
                               SideGraphSummary* summary) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("side graph: epsilon must be > 0");
  const Index n = d.n_entities();
  std::vector<double> defined;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (d.defined(i, j)) defined.push_back(d.dist(i, j));
    }
  }
  if (defined.empty()) {
    throw std::invalid_argument("side graph: no entity pair shares enough rated items (min_common = " +
                                std::to_string(cfg.min_common) + ")");
  }
  std::sort(defined.begin(), defined.end());
  double d_min = defined.front();
  if (cfg.exclude_zero_dmin) {
    auto it = std::upper_bound(defined.begin(), defined.end(), 0.0);
    if (it != defined.end()) d_min = *it;
  }
  if (!(cfg.epsilon > d_min)) {
    throw std::invalid_argument("side graph: epsilon " + std::to_string(cfg.epsilon) +
                                " does not exceed the minimum distance " + std::to_string(d_min));
  }
  const double alpha = cfg.alpha.value_or(default_kernel_alpha(cfg.epsilon, d_min));

  Matrix dist = d.dist;
  for (Index k = 0; k < dist.size(); ++k) {
    if (std::isnan(dist.data()[k])) dist.data()[k] = std::numeric_limits<double>::infinity();
  }
  WeightedGraph g = build_epsilon_graph(dist, cfg.epsilon, alpha, d_min);
  if (summary) {
    summary->d_min = d_min;
    summary->alpha = alpha;
    summary->epsilon = cfg.epsilon;
    summary->defined_pairs = static_cast<Index>(defined.size());
    summary->edge_count = g.n_edges();
    summary->quantiles.clear();
    for (double q : {0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) {
      summary->quantiles.emplace_back(q, Quantile(defined, q));
    }
  }
  return g;
}

WeightedGraph build_side_graph(const FeatureBlock& f, const SideGraphConfig& cfg,
                               SideGraphSummary* summary) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("side graph: epsilon must be > 0");
  return build_side_graph(pairwise_distances(f, cfg.min_common), cfg, summary);
}

}  // namespace gmc
