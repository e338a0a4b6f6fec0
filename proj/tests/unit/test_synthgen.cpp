#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "gmc/synthgen.hpp"

using namespace gmc;

namespace {

Index ComponentCount(const WeightedGraph& g, std::vector<Index>* label_out = nullptr) {
  std::vector<Index> label(g.n_vertices(), -1);
  Index count = 0;
  for (Index s = 0; s < g.n_vertices(); ++s) {
    if (label[s] >= 0) continue;
    std::vector<Index> stack{s};
    label[s] = count;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : g.neighbors(u)) {
        if (label[nb.vertex] < 0) {
          label[nb.vertex] = count;
          stack.push_back(nb.vertex);
        }
      }
    }
    ++count;
  }
  if (label_out) *label_out = label;
  return count;
}

Index Rank(const Matrix& m) {
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-9);
  return lu.rank();
}

}  // namespace

TEST_CASE("derive_seed separates streams deterministically") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("default spec has 10 x 12 communities and a rank-10 matrix") {
  const CommunitySpec spec = default_community_spec(150, 200, 10, 12, 7);
  CHECK(spec.row_community_sizes.size() == 10);
  CHECK(spec.col_community_sizes.size() == 12);
  CHECK(spec.rows() == 150);
  CHECK(spec.cols() == 200);
  for (Index s : spec.row_community_sizes) CHECK(s >= 8);
  for (Index s : spec.col_community_sizes) CHECK(s >= 8);
  const Matrix m = generate_matrix(spec);
  CHECK(Rank(m) == 10);
  for (Index k = 0; k < m.size(); ++k) {
    const double v = m.data()[k];
    CHECK(v == std::round(v));
    CHECK(v >= 1.0);
    CHECK(v <= 5.0);
  }
  CHECK(generate_matrix(default_community_spec(150, 200, 10, 12, 7)) == m);
}

TEST_CASE("generate_matrix rank edge cases") {
  CommunitySpec one;
  one.row_community_sizes = {4};
  one.col_community_sizes = {3};
  one.block_ratings = Eigen::MatrixXi::Constant(1, 1, 4);
  const Matrix c = generate_matrix(one);
  CHECK(c == Matrix::Constant(4, 3, 4.0));
  CHECK(Rank(c) == 1);

  CommunitySpec dup;
  dup.row_community_sizes = {2, 3, 2};
  dup.col_community_sizes = {2, 2, 2};
  dup.block_ratings.resize(3, 3);
  dup.block_ratings << 1, 2, 3, 1, 2, 3, 5, 1, 4;
  CHECK(Rank(generate_matrix(dup)) < 3);

  CommunitySpec bad = dup;
  bad.block_ratings(0, 0) = 6;
  CHECK_THROWS_AS(generate_matrix(bad), std::invalid_argument);
  bad = dup;
  bad.row_community_sizes = {2, 3};
  CHECK_THROWS_AS(generate_matrix(bad), std::invalid_argument);
}

TEST_CASE("random partition respects the minimum size") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto parts = random_partition(150, 10, 8, rng);
    CHECK(parts.size() == 10);
    CHECK(std::accumulate(parts.begin(), parts.end(), Index{0}) == 150);
    for (Index p : parts) CHECK(p >= 8);
  }
  CHECK_THROWS_AS(random_partition(70, 10, 8, rng), std::invalid_argument);
}

TEST_CASE("community graph without errors never crosses communities") {
  const std::vector<Index> sizes{12, 9, 20, 15};
  GraphNoiseSpec noise;
  noise.error_probability = 0.0;
  noise.seed = 5;
  const WeightedGraph g = generate_community_graph(sizes, noise, 11);
  const auto labels = community_labels(sizes);
  std::vector<Index> comp;
  ComponentCount(g, &comp);
  std::map<Index, Index> comp_to_comm;
  for (Index v = 0; v < g.n_vertices(); ++v) {
    auto [it, inserted] = comp_to_comm.emplace(comp[v], labels[v]);
    CHECK(it->second == labels[v]);
  }
  for (const Edge& e : g.edges()) CHECK(labels[e.u] == labels[e.v]);
  // The 3-NN subgraph is the same one intra_community_graph returns.
  const WeightedGraph intra = intra_community_graph(sizes, 3, 11);
  CHECK(intra.n_edges() == g.n_edges());
}

TEST_CASE("community graph with error probability 1 saturates cross pairs") {
  const std::vector<Index> sizes{8, 10, 9};
  GraphNoiseSpec noise;
  noise.error_probability = 1.0;
  const WeightedGraph g = generate_community_graph(sizes, noise, 2);
  const auto labels = community_labels(sizes);
  Index cross = 0;
  for (const Edge& e : g.edges()) cross += labels[e.u] != labels[e.v];
  CHECK(static_cast<double>(cross) == cross_community_pairs(sizes));
  CHECK(cross_community_pairs(sizes) == 8 * 10 + 8 * 9 + 10 * 9);
}

TEST_CASE("erroneous edge counts follow binomial statistics") {
  const std::vector<Index> sizes{15, 12, 18, 10, 20};
  const double pairs = cross_community_pairs(sizes);
  const auto labels = community_labels(sizes);
  const double p = 0.02;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GraphNoiseSpec noise;
    noise.error_probability = p;
    noise.seed = derive_seed(99, seed);
    const WeightedGraph g = generate_community_graph(sizes, noise, derive_seed(98, seed));
    for (const Edge& e : g.edges()) total += labels[e.u] != labels[e.v];
  }
  const double n = 20 * pairs;
  const double sd = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(total - n * p) <= 3 * sd);
}

TEST_CASE("error probability for a target erroneous fraction") {
  // frac / (1 - frac) * intra / pairs: then the expected cross count over
  // the expected total is exactly frac.
  const double p = error_probability_for_fraction(300, 5000.0, 0.1);
  CHECK(p == doctest::Approx(0.1 / 0.9 * 300 / 5000.0));
  CHECK(p * 5000.0 / (300 + p * 5000.0) == doctest::Approx(0.1));
  CHECK(error_probability_for_fraction(300, 5000.0, 0.0) == 0.0);
  CHECK_THROWS_AS(error_probability_for_fraction(300, 5000.0, 1.0), std::invalid_argument);
}

TEST_CASE("power-law inclusion probability examples") {
  CHECK(power_law_inclusion_probability(1, 1, 1.0) == 1.0);
  CHECK(power_law_inclusion_probability(1, 1, 7.0) == 1.0);
  CHECK(power_law_inclusion_probability(2, 2, 1.0) == doctest::Approx(0.25));
  CHECK(power_law_inclusion_probability(2, 3, 5.0) ==
        doctest::Approx(1.0 - std::pow(5.0 / 6.0, 5.0)));
  CHECK_THROWS_AS(power_law_inclusion_probability(0, 1, 1.0), std::invalid_argument);
}

TEST_CASE("power-law sampling frequencies match the closed form") {
  const Matrix m = Matrix::Constant(10, 10, 3.0);
  const std::array<std::pair<Index, Index>, 3> cells{{{1, 1}, {2, 3}, {10, 10}}};
  for (double s : {1.0, 5.0}) {
    std::array<int, 3> hits{};
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
      SamplingSpec spec;
      spec.mode = PowerLawSampling{s};
      spec.seed = derive_seed(static_cast<std::uint64_t>(s), t);
      const Matrix mask = sample_observations(m, spec).Mask();
      for (std::size_t c = 0; c < cells.size(); ++c) {
        hits[c] += mask(cells[c].first - 1, cells[c].second - 1) != 0.0;
      }
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double p = 1.0 - std::pow(1.0 - 1.0 / (cells[c].first * cells[c].second), s);
      const double sd = std::sqrt(trials * p * (1 - p));
      CHECK(std::abs(hits[c] - trials * p) <= 3 * sd + 1e-9);
    }
  }
}

TEST_CASE("uniform sampling draws an exact count and honours exclusions") {
  const Matrix m = Matrix::Constant(10, 12, 2.0);
  SamplingSpec spec;
  spec.mode = UniformSampling{1.0};
  CHECK(sample_observations(m, spec).size() == 120);
  spec.mode = UniformSampling{0.25};
  CHECK(sample_observations(m, spec).size() == 30);
  spec.mode = UniformSampling{0.0};
  CHECK(sample_observations(m, spec).empty());

  Matrix excluded = Matrix::Zero(10, 12);
  excluded.topRows(5).setOnes();
  spec.mode = UniformSampling{0.3};
  spec.seed = 4;
  const SparseObservations obs = sample_observations(m, spec, &excluded);
  CHECK(obs.size() == 36);
  for (const Entry& e : obs.entries()) CHECK(e.i >= 5);
  CHECK(sample_observations(m, spec, &excluded) == obs);
  // More than the eligible cells.
  spec.mode = UniformSampling{0.6};
  CHECK_THROWS_AS(sample_observations(m, spec, &excluded), std::invalid_argument);
  spec.mode = UniformSampling{1.5};
  CHECK_THROWS_AS(sample_observations(m, spec), std::invalid_argument);
}

TEST_CASE("epoch tuning hits the target expected density") {
  const int s = tune_power_law_epochs(150, 200, 0.15);
  const double at = power_law_expected_count(150, 200, s) / 30000.0;
  const double below = power_law_expected_count(150, 200, s - 1) / 30000.0;
  const double above = power_law_expected_count(150, 200, s + 1) / 30000.0;
  CHECK(std::abs(at - 0.15) <= std::abs(below - 0.15));
  CHECK(std::abs(at - 0.15) <= std::abs(above - 0.15));
  CHECK(std::abs(at - 0.15) < 0.01);
}

TEST_CASE("discrete Laplace noise") {
  Rng rng(1);
  const int n = 100000;
  const double b = 0.7;
  std::map<int, int> counts;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const int d = draw_discrete_laplace(rng, b);
    ++counts[d];
    sum += d;
  }
  // Variance of the rounded draw, estimated from the same sample.
  double var = 0.0;
  for (const auto& [v, c] : counts) var += c * (v - sum / n) * (v - sum / n);
  var /= n;
  CHECK(std::abs(sum / n) <= 3 * std::sqrt(var / n));
  for (int k = 1; k <= 3; ++k) {
    const double plus = counts[k];
    const double minus = counts[-k];
    CHECK(std::abs(plus - minus) <= 3 * std::sqrt(plus + minus) + 1);
  }
  // Zero is the mode and +-1 impulses dominate the rest.
  CHECK(counts[0] > counts[1]);
  CHECK(counts[1] > counts[2]);

  const Matrix m = Matrix::Constant(20, 20, 5.0);
  NoiseSpec spec;
  spec.seed = 3;
  const Matrix noisy = add_laplacian_noise(m, spec);
  CHECK(noisy.maxCoeff() <= 5.0);
  CHECK(noisy.minCoeff() >= 1.0);
  spec.scale = 1e-9;
  CHECK(add_laplacian_noise(m, spec) == m);
  spec.scale = 0.0;
  CHECK_THROWS_AS(add_laplacian_noise(m, spec), std::invalid_argument);
}
