#include "gmc/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmc {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Index CommunitySpec::rows() const {
  return std::accumulate(row_community_sizes.begin(), row_community_sizes.end(), Index{0});
}

Index CommunitySpec::cols() const {
  return std::accumulate(col_community_sizes.begin(), col_community_sizes.end(), Index{0});
}

void CommunitySpec::Validate() const {
  if (row_community_sizes.empty() || col_community_sizes.empty()) {
    throw std::invalid_argument("community spec: need at least one row and one column community");
  }
  for (Index s : row_community_sizes) {
    if (s <= 0) throw std::invalid_argument("community spec: row community sizes must be > 0");
  }
  for (Index s : col_community_sizes) {
    if (s <= 0) throw std::invalid_argument("community spec: column community sizes must be > 0");
  }
  const auto r = static_cast<Index>(row_community_sizes.size());
  const auto c = static_cast<Index>(col_community_sizes.size());
  if (block_ratings.rows() != r || block_ratings.cols() != c) {
    throw DimensionError("community spec: block table is " +
                         shape_string(block_ratings.rows(), block_ratings.cols()) +
                         " but there are " + shape_string(r, c) + " communities");
  }
  if ((block_ratings.array() < 1).any() || (block_ratings.array() > 5).any()) {
    throw std::invalid_argument("community spec: block ratings must lie in 1..5");
  }
}

std::vector<Index> random_partition(Index total, Index parts, Index min_size, Rng& rng) {
  if (parts < 1) throw std::invalid_argument("random_partition: parts must be >= 1");
  if (min_size < 1 || parts * min_size > total) {
    throw std::invalid_argument("random_partition: cannot split " + std::to_string(total) +
                                " into " + std::to_string(parts) + " parts of size >= " +
                                std::to_string(min_size));
  }
  const Index surplus = total - parts * min_size;
  std::uniform_int_distribution<Index> cut(0, surplus);
  std::vector<Index> cuts(static_cast<std::size_t>(parts - 1));
  for (Index& c : cuts) c = cut(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Index> sizes;
  Index prev = 0;
  for (Index c : cuts) {
    sizes.push_back(min_size + c - prev);
    prev = c;
  }
  sizes.push_back(min_size + surplus - prev);
  return sizes;
}

Eigen::MatrixXi random_block_ratings(Index row_communities, Index col_communities, Rng& rng) {
  std::uniform_int_distribution<int> rating(1, 5);
  const Index want = std::min(row_communities, col_communities);
  Eigen::MatrixXi table(row_communities, col_communities);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (Index i = 0; i < row_communities; ++i) {
      for (Index j = 0; j < col_communities; ++j) table(i, j) = rating(rng);
    }
    Eigen::FullPivLU<Matrix> lu(table.cast<double>());
    if (lu.rank() == want) return table;
  }
  throw std::runtime_error("random_block_ratings: no full-rank table after 1000 draws");
}

CommunitySpec default_community_spec(Index rows, Index cols, Index row_communities,
                                     Index col_communities, std::uint64_t seed) {
  constexpr Index kMinCommunity = 8;
  Rng rng(seed);
  CommunitySpec spec;
  spec.seed = seed;
  spec.row_community_sizes = random_partition(rows, row_communities, kMinCommunity, rng);
  spec.col_community_sizes = random_partition(cols, col_communities, kMinCommunity, rng);
  spec.block_ratings = random_block_ratings(row_communities, col_communities, rng);
  return spec;
}

std::vector<Index> community_labels(std::span<const Index> sizes) {
  std::vector<Index> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    labels.insert(labels.end(), static_cast<std::size_t>(sizes[c]), static_cast<Index>(c));
  }
  return labels;
}

Matrix generate_matrix(const CommunitySpec& spec) {
  spec.Validate();
  const auto row_label = community_labels(spec.row_community_sizes);
  const auto col_label = community_labels(spec.col_community_sizes);
  Matrix m(spec.rows(), spec.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      m(i, j) = spec.block_ratings(row_label[i], col_label[j]);
    }
  }
  return m;
}

WeightedGraph intra_community_graph(std::span<const Index> community_sizes, Index k_intra,
                                    std::uint64_t embedding_seed) {
  if (k_intra < 1) throw std::invalid_argument("community graph: k_intra must be >= 1");
  Rng rng(embedding_seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::vector<Edge> edges;
  Index offset = 0;
  for (Index size : community_sizes) {
    if (size < k_intra + 1) {
      throw std::invalid_argument("community graph: community of size " + std::to_string(size) +
                                  " cannot host a " + std::to_string(k_intra) + "-NN graph");
    }
    Eigen::MatrixX2d pts(size, 2);
    for (Index p = 0; p < size; ++p) {
      pts(p, 0) = coord(rng);
      pts(p, 1) = coord(rng);
    }
    Matrix dist(size, size);
    for (Index a = 0; a < size; ++a) {
      for (Index b = 0; b < size; ++b) dist(a, b) = (pts.row(a) - pts.row(b)).norm();
    }
    const WeightedGraph local = build_knn_graph(dist, k_intra, KnnWeights::kBinary);
    for (const Edge& e : local.edges()) edges.push_back({e.u + offset, e.v + offset, 1.0});
    offset += size;
  }
  return WeightedGraph(offset, std::move(edges));
}

WeightedGraph generate_community_graph(std::span<const Index> community_sizes,
                                       const GraphNoiseSpec& noise,
                                       std::uint64_t embedding_seed) {
  if (!(noise.error_probability >= 0.0 && noise.error_probability <= 1.0)) {
    throw std::invalid_argument("community graph: error probability must lie in [0, 1]");
  }
  const WeightedGraph intra = intra_community_graph(community_sizes, noise.k_intra,
                                                    embedding_seed);
  std::vector<Edge> edges = intra.edges();
  const auto labels = community_labels(community_sizes);
  const auto n = static_cast<Index>(labels.size());
  Rng rng(noise.seed);
  std::bernoulli_distribution coin(noise.error_probability);
  if (noise.error_probability > 0.0) {
    for (Index u = 0; u < n; ++u) {
      for (Index v = u + 1; v < n; ++v) {
        if (labels[u] != labels[v] && coin(rng)) edges.push_back({u, v, 1.0});
      }
    }
  }
  return WeightedGraph(n, std::move(edges));
}

double cross_community_pairs(std::span<const Index> community_sizes) {
  double total = 0.0;
  double same = 0.0;
  for (Index s : community_sizes) {
    total += static_cast<double>(s);
    same += static_cast<double>(s) * static_cast<double>(s - 1) / 2.0;
  }
  return total * (total - 1.0) / 2.0 - same;
}

double error_probability_for_fraction(Index intra_edges, double cross_pairs,
                                      double error_fraction) {
  if (!(error_fraction >= 0.0 && error_fraction < 1.0)) {
    throw std::invalid_argument("erroneous edge fraction must lie in [0, 1)");
  }
  if (error_fraction == 0.0) return 0.0;
  if (!(cross_pairs > 0.0)) throw std::invalid_argument("no cross-community pairs");
  const double wanted = error_fraction / (1.0 - error_fraction) * static_cast<double>(intra_edges);
  return std::min(1.0, wanted / cross_pairs);
}

double power_law_inclusion_probability(Index i1, Index j1, double epochs) {
  if (i1 < 1 || j1 < 1) throw std::invalid_argument("power law: indices are 1-based");
  if (!(epochs >= 0.0)) throw std::invalid_argument("power law: epochs must be >= 0");
  const double q = 1.0 / (static_cast<double>(i1) * static_cast<double>(j1));
  // 1 - (1 - q)^s, written to stay accurate for small q.
  return -std::expm1(epochs * std::log1p(-q));
}

namespace {

bool Excluded(const Matrix* excluded, Index i, Index j) {
  return excluded != nullptr && (*excluded)(i, j) != 0.0;
}

void CheckExcluded(const Matrix* excluded, Index rows, Index cols) {
  if (excluded && (excluded->rows() != rows || excluded->cols() != cols)) {
    throw DimensionError("sampling: exclusion mask is " +
                         shape_string(excluded->rows(), excluded->cols()) + ", expected " +
                         shape_string(rows, cols));
  }
}

}  // namespace

double power_law_expected_count(Index rows, Index cols, double epochs, const Matrix* excluded) {
  CheckExcluded(excluded, rows, cols);
  double total = 0.0;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      if (!Excluded(excluded, i, j)) total += power_law_inclusion_probability(i + 1, j + 1, epochs);
    }
  }
  return total;
}

int tune_power_law_epochs(Index rows, Index cols, double target_density, const Matrix* excluded) {
  const double cells = static_cast<double>(rows) * static_cast<double>(cols);
  const double target = target_density * cells;
  auto expected = [&](double s) { return power_law_expected_count(rows, cols, s, excluded); };
  if (expected(1.0) >= target) return 1;
  // The expected count is increasing in s; bracket, then bisect on integers.
  long lo = 1, hi = 2;
  const double ceiling = power_law_expected_count(rows, cols, 1e12, excluded);
  if (target >= ceiling) {
    throw std::invalid_argument("power-law sampling cannot reach the requested density");
  }
  while (expected(static_cast<double>(hi)) < target) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (expected(static_cast<double>(mid)) < target) lo = mid; else hi = mid;
  }
  const double below = target - expected(static_cast<double>(lo));
  const double above = expected(static_cast<double>(hi)) - target;
  return static_cast<int>(below <= above ? lo : hi);
}

SparseObservations sample_observations(const Matrix& m, const SamplingSpec& spec,
                                       const Matrix* excluded) {
  CheckExcluded(excluded, m.rows(), m.cols());
  Rng rng(spec.seed);
  std::vector<Entry> entries;
  if (const auto* uni = std::get_if<UniformSampling>(&spec.mode)) {
    if (!(uni->fraction >= 0.0 && uni->fraction <= 1.0)) {
      throw std::invalid_argument("uniform sampling: fraction must lie in [0, 1]");
    }
    std::vector<Index> eligible;
    for (Index c = 0; c < m.size(); ++c) {
      if (!Excluded(excluded, c % m.rows(), c / m.rows())) eligible.push_back(c);
    }
    const double cells = static_cast<double>(m.size());
    // Guard against fraction * cells landing a hair above an integer.
    const auto want = static_cast<std::size_t>(std::ceil(uni->fraction * cells - 1e-9));
    if (want > eligible.size()) {
      throw std::invalid_argument("uniform sampling: " + std::to_string(want) +
                                  " cells requested but only " +
                                  std::to_string(eligible.size()) + " are eligible");
    }
    // Partial Fisher-Yates.
    for (std::size_t k = 0; k < want; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, eligible.size() - 1);
      std::swap(eligible[k], eligible[pick(rng)]);
    }
    eligible.resize(want);
    for (Index c : eligible) {
      const Index i = c % m.rows();
      const Index j = c / m.rows();
      entries.push_back({i, j, m(i, j)});
    }
  } else {
    const auto& pl = std::get<PowerLawSampling>(spec.mode);
    if (!(pl.epochs >= 1.0)) throw std::invalid_argument("power-law sampling: epochs must be >= 1");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) {
        const double p = power_law_inclusion_probability(i + 1, j + 1, pl.epochs);
        const bool hit = u01(rng) < p;
        if (hit && !Excluded(excluded, i, j)) entries.push_back({i, j, m(i, j)});
      }
    }
  }
  return SparseObservations(m.rows(), m.cols(), std::move(entries));
}

int draw_discrete_laplace(Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double x = u(rng);
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(x));
  return static_cast<int>(std::lround(x < 0.0 ? -magnitude : magnitude));
}

Matrix add_laplacian_noise(const Matrix& m, const NoiseSpec& spec) {
  if (!(spec.scale > 0.0)) throw std::invalid_argument("laplacian noise: scale must be > 0");
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("laplacian noise: need lo < hi");
  Rng rng(spec.seed);
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double noisy = m(i, j) + draw_discrete_laplace(rng, spec.scale);
      out(i, j) = std::clamp(noisy, spec.lo, spec.hi);
    }
  }
  return out;
}

}  // namespace gmc
