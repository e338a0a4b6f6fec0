#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmc/eval.hpp"
#include "gmc/graphbuild.hpp"
#include "gmc/io.hpp"
#include "gmc/solver.hpp"

namespace gmc::cli {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "0.1.0";

// 64-bit FNV-1a, hex encoded. Used for manifest spec hashes.
std::string fnv1a_hex(const std::string& text);

struct SynthOptions {
  Index rows = 150;
  Index cols = 200;
  Index row_communities = 10;
  Index col_communities = 12;
  Index k_intra = 3;
  double graph_error = 0.10;  // fraction of graph edges that are erroneous
  double noise_scale = 0.0;   // Laplace scale; 0 keeps the matrix noiseless
  std::string sampling = "uniform";
  double fraction = 0.20;     // uniform: observed fraction; powerlaw: target density
  double epochs = 0.0;        // powerlaw: explicit s, 0 = tune from fraction
  std::uint64_t seed = 1;
  fs::path out_dir = "synth";

  // Canonical text of every parameter that influences the artifacts.
  std::string Canonical() const;
};

struct SynthArtifacts {
  Matrix truth;
  Matrix matrix;
  SparseObservations observations;
  WeightedGraph row_graph;
  WeightedGraph col_graph;
  std::vector<Index> row_communities;
  std::vector<Index> col_communities;
  std::string spec_hash;
};

// In-memory synthetic dataset; cmd_synth writes exactly this.
SynthArtifacts make_synth(const SynthOptions& opt);
SynthArtifacts cmd_synth(const SynthOptions& opt);

struct IngestOptions {
  fs::path ratings;
  std::string delimiter = "::";
  Index target_rows = 500;
  Index target_cols = 500;
  double row_percentile = 99.0;
  double col_percentile = 95.0;
  double rating_min = 0.5;  // declared rating range; values outside are rejected
  double rating_max = 5.0;
  fs::path out_dir = "ingest";
};

struct IngestResult {
  std::vector<std::string> users;   // selected, in output row order
  std::vector<std::string> movies;  // selected, in output column order
  SparseObservations m;
  SparseObservations user_features;   // users x non-selected movies
  SparseObservations movie_features;  // movies x non-selected users
  std::vector<std::string> user_feature_items;
  std::vector<std::string> movie_feature_users;
  double density = 0.0;
};

// Entities ordered by increasing rating count (ties by id); a window of
// `count` consecutive entities centred on the given percentile position.
std::vector<std::string> select_near_percentile(
    const std::vector<std::pair<std::string, Index>>& frequencies, Index count,
    double percentile);

IngestResult ingest_ratings(const std::vector<io::Rating>& ratings, const IngestOptions& opt);
IngestResult cmd_ingest(const IngestOptions& opt);

struct BuildGraphOptions {
  fs::path features;
  std::optional<Index> entities;
  std::string method = "epsilon";  // or "knn"
  double epsilon = 1.1;
  std::optional<double> alpha;
  Index min_common = 3;
  bool exclude_zero_dmin = false;
  Index k = 10;
  fs::path out = "graph.edges";
  std::optional<fs::path> summary;
};

WeightedGraph cmd_build_graph(const BuildGraphOptions& opt);

struct GraphInputs {
  std::optional<fs::path> row_graph;
  std::optional<fs::path> col_graph;
};

struct SolveOptions {
  fs::path observations;
  GraphInputs graphs;
  SolverConfig solver;
  std::optional<fs::path> test;
  std::optional<ClipRange> clip;
  fs::path out = "recovered.csv";
  std::optional<fs::path> trace;
};

struct SolveSummary {
  SolveReport report;
  double train_rmse = 0.0;
  std::optional<double> test_rmse;
};

SolveSummary cmd_solve(const SolveOptions& opt);

struct SweepOptions {
  fs::path truth;
  GraphInputs graphs;
  SweepConfig sweep;
  fs::path out = "sweep.csv";
};

SweepResult cmd_sweep(const SweepOptions& opt);
void write_sweep_csv(const fs::path& path, const SweepResult& result);

struct CvOptions {
  fs::path observations;
  GraphInputs graphs;
  CVConfig cv;
  Variant variant = Variant::kCombined;
  SolverConfig solver;
  fs::path out = "cv.csv";
};

CVResult cmd_cv(const CvOptions& opt);

// Rating count of every distinct id, in first-appearance order.
std::vector<std::pair<std::string, Index>> count_by(const std::vector<io::Rating>& ratings,
                                                    bool by_user);

}  // namespace gmc::cli
