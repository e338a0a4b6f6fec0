#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmc/observations.hpp"
#include "gmc/solver.hpp"

namespace gmc {

enum class Variant {
  kNuclearOnly,  // gamma_r = gamma_c = 0
  kGraphsOnly,   // gamma_n = 0
  kCombined,
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct EvalSplit {
  SparseObservations train;
  SparseObservations test;
};

// Seeded uniform partition of the observed entries; the test part holds
// round(test_fraction * |Omega|) entries.
EvalSplit make_split(const SparseObservations& obs, double test_fraction, std::uint64_t seed);

struct GridCell {
  double gamma_n = 0.0;
  double gamma_r = 0.0;
  double gamma_c = 0.0;
  auto operator<=>(const GridCell&) const = default;
};

struct CVConfig {
  int folds = 5;
  std::vector<double> gamma_n{1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> gamma_r{1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> gamma_c{1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::uint64_t seed = 0;
  int threads = 1;

  void Validate() const;
};

// Cells consistent with the variant, sorted lexicographically, unique.
std::vector<GridCell> grid_cells(const CVConfig& cv, Variant variant);

// Disjoint seeded cover of 0..n_entries-1 by `folds` parts.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n_entries, int folds,
                                                 std::uint64_t seed);

struct CVCellResult {
  GridCell cell;
  double mean_rmse = 0.0;
  std::vector<double> fold_rmse;
  std::vector<int> fold_iterations;
};

struct CVResult {
  GridCell best;
  double best_rmse = 0.0;
  std::vector<CVCellResult> table;  // in grid_cells order
};

SolverConfig with_cell(const SolverConfig& base, const GridCell& cell);

// k-fold grid search. Each cell is scored by the mean held-fold RMSE of a
// solve on the remaining folds; the best cell is the argmin, ties going to
// the lexicographically smallest (gamma_n, gamma_r, gamma_c).
CVResult cross_validate(const SparseObservations& train, const GraphRegularizers& graphs,
                        const CVConfig& cv, Variant variant, const SolverConfig& base);

// Held-out entries of a sweep; counts every read of its values.
class HeldOutSet {
 public:
  explicit HeldOutSet(SparseObservations test) : test_(std::move(test)) {}

  const SparseObservations& support_only() const { return test_; }
  double Rmse(const Matrix& x, std::optional<ClipRange> clip = std::nullopt) const;
  std::size_t reads() const { return reads_; }

 private:
  SparseObservations test_;
  mutable std::size_t reads_ = 0;
};

enum class SamplingKind { kUniform, kPowerLaw };

struct SweepConfig {
  std::vector<double> levels{0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50};
  std::vector<Variant> variants{Variant::kNuclearOnly, Variant::kGraphsOnly, Variant::kCombined};
  double test_fraction = 0.35;  // of all cells, fixed across levels
  SamplingKind sampling = SamplingKind::kUniform;
  CVConfig cv;
  SolverConfig solver;
  std::optional<ClipRange> clip;
  std::uint64_t seed = 0;
};

struct SweepRow {
  double level = 0.0;
  Variant variant = Variant::kNuclearOnly;
  GridCell cell;
  double rmse_test = 0.0;
  int iters = 0;
  double seconds = 0.0;
  double density = 0.0;  // achieved training density over all cells
  double epochs = 0.0;   // power-law s, 0 for uniform
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // level-major, variants in config order
  std::size_t test_reads = 0;
  std::size_t test_reads_during_cv = 0;
};

// For every level: sample training entries away from a fixed test set,
// cross-validate every variant, refit on all training entries with the
// selected cell and score on the test set.
SweepResult observation_sweep(const Matrix& m_true, const GraphRegularizers& graphs,
                              const SweepConfig& cfg);

// Fixed test cells: round(test_fraction * m * n) cells drawn uniformly.
SparseObservations sweep_test_set(const Matrix& m_true, double test_fraction, std::uint64_t seed);

}  // namespace gmc
