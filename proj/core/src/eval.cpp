#include "gmc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "gmc/synthgen.hpp"

namespace gmc {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kNuclearOnly: return "nuclear";
    case Variant::kGraphsOnly: return "graphs";
    case Variant::kCombined: return "combined";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "nuclear" || name == "nuclear-only") return Variant::kNuclearOnly;
  if (name == "graphs" || name == "graphs-only") return Variant::kGraphsOnly;
  if (name == "combined") return Variant::kCombined;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected nuclear, graphs or combined)");
}

namespace {

std::vector<std::size_t> Shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t k = n; k > 1; --k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::swap(order[k - 1], order[pick(rng)]);
  }
  return order;
}

}  // namespace

EvalSplit make_split(const SparseObservations& obs, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("make_split: test fraction must lie in (0, 1)");
  }
  const auto n_test =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(obs.size())));
  if (n_test == 0) throw std::invalid_argument("make_split: test set would be empty");
  if (n_test >= obs.size()) throw std::invalid_argument("make_split: training set would be empty");
  const auto order = Shuffled(obs.size(), seed);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  return {obs.Select(train), obs.Select(test)};
}

void CVConfig::Validate() const {
  if (folds < 2) throw std::invalid_argument("cv: folds must be >= 2");
  if (gamma_n.empty() || gamma_r.empty() || gamma_c.empty()) {
    throw std::invalid_argument("cv: every grid must be non-empty");
  }
  if (threads < 1) throw std::invalid_argument("cv: threads must be >= 1");
  for (const auto* grid : {&gamma_n, &gamma_r, &gamma_c}) {
    for (double g : *grid) {
      if (!(g >= 0.0 && std::isfinite(g))) {
        throw std::invalid_argument("cv: grid values must be finite and >= 0");
      }
    }
  }
}

std::vector<GridCell> grid_cells(const CVConfig& cv, Variant variant) {
  const std::vector<double> zero{0.0};
  const auto& gn = variant == Variant::kGraphsOnly ? zero : cv.gamma_n;
  const auto& gr = variant == Variant::kNuclearOnly ? zero : cv.gamma_r;
  const auto& gc = variant == Variant::kNuclearOnly ? zero : cv.gamma_c;
  std::vector<GridCell> cells;
  for (double a : gn) {
    for (double b : gr) {
      for (double c : gc) cells.push_back({a, b, c});
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n_entries, int folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("make_folds: folds must be >= 2");
  if (n_entries < static_cast<std::size_t>(folds)) {
    throw std::invalid_argument("make_folds: " + std::to_string(n_entries) +
                                " entries cannot fill " + std::to_string(folds) + " folds");
  }
  const auto order = Shuffled(n_entries, seed);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  for (std::size_t k = 0; k < order.size(); ++k) out[k % out.size()].push_back(order[k]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

SolverConfig with_cell(const SolverConfig& base, const GridCell& cell) {
  SolverConfig cfg = base;
  cfg.gamma_n = cell.gamma_n;
  cfg.gamma_r = cell.gamma_r;
  cfg.gamma_c = cell.gamma_c;
  return cfg;
}

CVResult cross_validate(const SparseObservations& train, const GraphRegularizers& graphs,
                        const CVConfig& cv, Variant variant, const SolverConfig& base) {
  cv.Validate();
  const auto folds = make_folds(train.size(), cv.folds, cv.seed);
  std::vector<SparseObservations> fit(folds.size());
  std::vector<SparseObservations> held(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(rest.begin(), rest.end());
    fit[f] = train.Select(rest);
    held[f] = train.Select(folds[f]);
    if (held[f].empty() || fit[f].empty()) {
      throw std::invalid_argument("cross_validate: fold " + std::to_string(f) + " is empty");
    }
  }

  const auto cells = grid_cells(cv, variant);
  const std::size_t n_tasks = cells.size() * folds.size();
  std::vector<double> task_rmse(n_tasks);
  std::vector<int> task_iters(n_tasks);
  auto run = [&](std::size_t t) {
    const std::size_t c = t / folds.size();
    const std::size_t f = t % folds.size();
    const SolveReport rep = admm_solve(fit[f], graphs, with_cell(base, cells[c]));
    task_rmse[t] = rmse(rep.recovered, held[f]);
    task_iters[t] = rep.iterations_used;
  };
  if (cv.threads <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> workers;
      for (int w = 0; w < cv.threads; ++w) {
        workers.emplace_back([&] {
          for (std::size_t t = next++; t < n_tasks && !failed; t = next++) {
            try {
              run(t);
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  CVResult out;
  out.table.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CVCellResult row;
    row.cell = cells[c];
    for (std::size_t f = 0; f < folds.size(); ++f) {
      row.fold_rmse.push_back(task_rmse[c * folds.size() + f]);
      row.fold_iterations.push_back(task_iters[c * folds.size() + f]);
    }
    row.mean_rmse = std::accumulate(row.fold_rmse.begin(), row.fold_rmse.end(), 0.0) /
                    static_cast<double>(folds.size());
    out.table.push_back(std::move(row));
  }
  // Cells are sorted, so strict < keeps the smallest cell among ties.
  std::size_t best = 0;
  for (std::size_t c = 1; c < out.table.size(); ++c) {
    if (out.table[c].mean_rmse < out.table[best].mean_rmse) best = c;
  }
  out.best = out.table[best].cell;
  out.best_rmse = out.table[best].mean_rmse;
  return out;
}

double HeldOutSet::Rmse(const Matrix& x, std::optional<ClipRange> clip) const {
  reads_ += test_.size();
  return rmse(x, test_, clip);
}

SparseObservations sweep_test_set(const Matrix& m_true, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("sweep: test fraction must lie in (0, 1)");
  }
  const auto cells = static_cast<std::size_t>(m_true.size());
  const auto n_test =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(cells)));
  if (n_test == 0) throw std::invalid_argument("sweep: test set would be empty");
  auto order = Shuffled(cells, seed);
  order.resize(n_test);
  std::vector<Entry> entries;
  entries.reserve(n_test);
  for (std::size_t c : order) {
    const Index i = static_cast<Index>(c) % m_true.rows();
    const Index j = static_cast<Index>(c) / m_true.rows();
    entries.push_back({i, j, m_true(i, j)});
  }
  return SparseObservations(m_true.rows(), m_true.cols(), std::move(entries));
}

SweepResult observation_sweep(const Matrix& m_true, const GraphRegularizers& graphs,
                              const SweepConfig& cfg) {
  cfg.solver.Validate();
  cfg.cv.Validate();
  if (cfg.variants.empty()) throw std::invalid_argument("sweep: no variants requested");
  for (double level : cfg.levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument("sweep: observation levels must lie in (0, 1)");
    }
    if (level > 1.0 - cfg.test_fraction + 1e-12) {
      throw std::invalid_argument("sweep: level " + std::to_string(level) +
                                  " leaves no room for the test fraction");
    }
  }

  const HeldOutSet test(sweep_test_set(m_true, cfg.test_fraction, derive_seed(cfg.seed, 0)));
  const Matrix test_mask = test.support_only().Mask();

  SweepResult result;
  for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
    const double level = cfg.levels[li];
    SamplingSpec sampling;
    sampling.seed = derive_seed(cfg.seed, 100 + li);
    double epochs = 0.0;
    if (cfg.sampling == SamplingKind::kUniform) {
      sampling.mode = UniformSampling{level};
    } else {
      epochs = tune_power_law_epochs(m_true.rows(), m_true.cols(), level, &test_mask);
      sampling.mode = PowerLawSampling{epochs};
    }
    const SparseObservations train = sample_observations(m_true, sampling, &test_mask);

    for (Variant variant : cfg.variants) {
      CVConfig cv = cfg.cv;
      cv.seed = derive_seed(cfg.cv.seed ^ cfg.seed, 1000 + li);
      const std::size_t reads_before = test.reads();
      const CVResult picked = cross_validate(train, graphs, cv, variant, cfg.solver);
      result.test_reads_during_cv += test.reads() - reads_before;

      const auto t0 = std::chrono::steady_clock::now();
      const SolveReport rep = admm_solve(train, graphs, with_cell(cfg.solver, picked.best));
      const auto t1 = std::chrono::steady_clock::now();

      SweepRow row;
      row.level = level;
      row.variant = variant;
      row.cell = picked.best;
      row.rmse_test = test.Rmse(rep.recovered, cfg.clip);
      row.iters = rep.iterations_used;
      row.seconds = std::chrono::duration<double>(t1 - t0).count();
      row.density = train.density();
      row.epochs = epochs;
      row.converged = rep.converged;
      result.rows.push_back(row);
    }
  }
  result.test_reads = test.reads();
  return result;
}

}  // namespace gmc
