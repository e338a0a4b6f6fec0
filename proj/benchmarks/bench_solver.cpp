#include <benchmark/benchmark.h>

#include <random>

#include "gmc/graphs.hpp"
#include "gmc/solver.hpp"
#include "gmc/synthgen.hpp"

namespace {

using namespace gmc;

Matrix Uniform(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

// Community graph on n vertices split into communities of ten.
WeightedGraph Graph(Index n, std::uint64_t seed) {
  std::vector<Index> sizes(static_cast<std::size_t>(n / 10), 10);
  GraphNoiseSpec spec;
  spec.error_probability = 0.01;
  spec.seed = seed;
  return generate_community_graph(sizes, spec, seed + 100);
}

struct Instance {
  Matrix truth;
  SparseObservations obs;
  WeightedGraph rows;
  WeightedGraph cols;
};

Instance MakeInstance(Index m, Index n) {
  CommunitySpec spec = default_community_spec(m, n, m / 15, n / 16, 1);
  Matrix truth = generate_matrix(spec);
  SamplingSpec sampling;
  sampling.mode = UniformSampling{0.2};
  sampling.seed = 2;
  SparseObservations obs = sample_observations(truth, sampling);
  return {std::move(truth), std::move(obs), Graph(m, 3), Graph(n, 4)};
}

void BM_SvtProx(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix h = Uniform(n, n + n / 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(svt_prox(h, 5.0));
}
BENCHMARK(BM_SvtProx)->Arg(50)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_LaplacianApply(benchmark::State& state) {
  const Index n = state.range(0);
  const WeightedGraph g = Graph(n, 5);
  const Matrix x = Uniform(n, 200, 6);
  Matrix out;
  for (auto _ : state) {
    laplacian_apply_into(LaplacianView(g), x, Side::kLeft, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_LaplacianApply)->Arg(150)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

void BM_YSubproblem(benchmark::State& state) {
  const Instance inst = MakeInstance(150, 200);
  GraphRegularizers graphs;
  graphs.rows.emplace(inst.rows);
  graphs.cols.emplace(inst.cols);
  SolverConfig cfg;
  cfg.gamma_r = 0.01;
  cfg.gamma_c = 0.01;
  cfg.krylov = state.range(0) == 0 ? KrylovMethod::kConjugateResidual
                                   : KrylovMethod::kConjugateGradient;
  const Matrix h = Uniform(150, 200, 7);
  const Matrix y0 = Matrix::Zero(150, 200);
  for (auto _ : state) benchmark::DoNotOptimize(y_subproblem(inst.obs, graphs, h, cfg, y0));
}
BENCHMARK(BM_YSubproblem)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AdmmSolve(benchmark::State& state) {
  const Instance inst = MakeInstance(state.range(0), state.range(0) * 4 / 3);
  GraphRegularizers graphs;
  graphs.rows.emplace(inst.rows);
  graphs.cols.emplace(inst.cols);
  SolverConfig cfg;
  cfg.gamma_n = 0.1;
  cfg.gamma_r = 3e-3;
  cfg.gamma_c = 3e-3;
  int iters = 0;
  for (auto _ : state) {
    const SolveReport rep = admm_solve(inst.obs, graphs, cfg);
    iters = rep.iterations_used;
    benchmark::DoNotOptimize(rep.recovered.data());
  }
  state.counters["admm_iters"] = iters;
}
BENCHMARK(BM_AdmmSolve)->Arg(60)->Arg(150)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
