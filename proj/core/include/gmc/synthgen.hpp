#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "gmc/graphs.hpp"
#include "gmc/observations.hpp"
#include "gmc/types.hpp"

namespace gmc {

using Rng = std::mt19937_64;

// Independent child seed for a numbered stream (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct CommunitySpec {
  std::vector<Index> row_community_sizes;
  std::vector<Index> col_community_sizes;
  Eigen::MatrixXi block_ratings;  // (#row communities) x (#column communities), in 1..5
  std::uint64_t seed = 0;

  Index rows() const;
  Index cols() const;
  void Validate() const;
};

// Splits total into parts sizes, each >= min_size, with the surplus spread
// by uniformly random cut points.
std::vector<Index> random_partition(Index total, Index parts, Index min_size, Rng& rng);

// Seeded uniform integer table in [1, 5] with full row rank (or full column
// rank when there are more rows than columns), redrawn until it has it.
Eigen::MatrixXi random_block_ratings(Index row_communities, Index col_communities, Rng& rng);

// Community layout used by the synthetic benchmark: seeded partitions with
// minimum community size 8 and a full-rank block table.
CommunitySpec default_community_spec(Index rows, Index cols, Index row_communities = 10,
                                     Index col_communities = 12, std::uint64_t seed = 1);

// Community index of every row (or column), contiguous ranges in order.
std::vector<Index> community_labels(std::span<const Index> sizes);

// M_ij = block_ratings(community(i), community(j)).
Matrix generate_matrix(const CommunitySpec& spec);

struct GraphNoiseSpec {
  Index k_intra = 3;
  double error_probability = 0.0;  // per cross-community pair
  std::uint64_t seed = 0;
};

// k-NN graph inside each community, computed on i.i.d. uniform 2-D latent
// points, without any cross-community edges. All weights are 1.
WeightedGraph intra_community_graph(std::span<const Index> community_sizes, Index k_intra,
                                    std::uint64_t embedding_seed);

// Intra-community k-NN graph plus Erdos-Renyi cross-community edges.
WeightedGraph generate_community_graph(std::span<const Index> community_sizes,
                                       const GraphNoiseSpec& noise,
                                       std::uint64_t embedding_seed);

// Number of vertex pairs lying in different communities.
double cross_community_pairs(std::span<const Index> community_sizes);

// Erdos-Renyi probability for which erroneous edges make up the given
// fraction of all edges in expectation.
double error_probability_for_fraction(Index intra_edges, double cross_pairs,
                                      double error_fraction);

struct UniformSampling {
  double fraction = 0.2;  // of all m*n cells
};
struct PowerLawSampling {
  double epochs = 1.0;  // s
};

struct SamplingSpec {
  std::variant<UniformSampling, PowerLawSampling> mode = UniformSampling{};
  std::uint64_t seed = 0;
};

// 1 - (1 - 1/(i j))^s with 1-based i, j.
double power_law_inclusion_probability(Index i1, Index j1, double epochs);

// Expected number of cells drawn by power-law sampling, skipping excluded
// cells.
double power_law_expected_count(Index rows, Index cols, double epochs,
                                const Matrix* excluded = nullptr);

// Integer epoch count whose expected density over the eligible cells is
// closest to target_density (a fraction of all m*n cells).
int tune_power_law_epochs(Index rows, Index cols, double target_density,
                          const Matrix* excluded = nullptr);

// Observes cells of M. Uniform mode draws ceil(fraction * m * n) distinct
// cells without replacement; power-law mode keeps each cell independently.
// Cells where excluded is nonzero are never drawn.
SparseObservations sample_observations(const Matrix& m, const SamplingSpec& spec,
                                       const Matrix* excluded = nullptr);

struct NoiseSpec {
  double scale = 0.7;  // Laplace scale b
  double lo = 1.0;
  double hi = 5.0;
  std::uint64_t seed = 0;
};

// Laplace(0, b) rounded to the nearest integer.
int draw_discrete_laplace(Rng& rng, double scale);

Matrix add_laplacian_noise(const Matrix& m, const NoiseSpec& spec);

}  // namespace gmc
