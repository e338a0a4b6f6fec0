// gmc: graph-regularised matrix completion toolkit.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"

namespace {

using gmc::Index;
namespace cli = gmc::cli;

struct PathFlag {
  std::string value;
  std::optional<std::filesystem::path> get() const {
    if (value.empty()) return std::nullopt;
    return std::filesystem::path(value);
  }
};

struct SolverFlags {
  std::string krylov = "cr";
  bool fixed_rho = false;
};

void AddSolverFlags(CLI::App* cmd, gmc::SolverConfig& cfg, SolverFlags& extra) {
  cmd->add_option("--gamma-n", cfg.gamma_n, "Nuclear norm weight")->capture_default_str();
  cmd->add_option("--gamma-r", cfg.gamma_r, "Row-graph Dirichlet weight")->capture_default_str();
  cmd->add_option("--gamma-c", cfg.gamma_c, "Column-graph Dirichlet weight")
      ->capture_default_str();
  cmd->add_option("--rho", cfg.rho, "ADMM penalty (initial value when adaptive)")
      ->capture_default_str();
  cmd->add_flag("--fixed-rho", extra.fixed_rho, "Disable residual balancing of rho");
  cmd->add_option("--max-iter", cfg.max_iter, "ADMM iteration cap")->capture_default_str();
  cmd->add_option("--tol-abs", cfg.tol_abs, "Absolute stopping tolerance")->capture_default_str();
  cmd->add_option("--tol-rel", cfg.tol_rel, "Relative stopping tolerance")->capture_default_str();
  cmd->add_option("--cg-tol", cfg.cg_tol, "Inner solve relative tolerance")
      ->capture_default_str();
  cmd->add_option("--cg-max-iter", cfg.cg_max_iter, "Inner solve iteration cap")
      ->capture_default_str();
  cmd->add_option("--krylov", extra.krylov, "Inner solver: cr (conjugate residual) or cg")
      ->check(CLI::IsMember({"cr", "cg"}))
      ->capture_default_str();
  cmd->add_flag("--mean-init", cfg.impute_mean_init,
                "Initialise unobserved cells at the observed mean");
}

void FinishSolver(gmc::SolverConfig& cfg, const SolverFlags& extra) {
  cfg.krylov = extra.krylov == "cg" ? gmc::KrylovMethod::kConjugateGradient
                                    : gmc::KrylovMethod::kConjugateResidual;
  if (extra.fixed_rho) cfg.adaptive_rho = false;
}

void AddGraphFlags(CLI::App* cmd, PathFlag& rows, PathFlag& cols) {
  cmd->add_option("--row-graph", rows.value, "Row-graph edge list");
  cmd->add_option("--col-graph", cols.value, "Column-graph edge list");
}

void AddCvFlags(CLI::App* cmd, gmc::CVConfig& cv) {
  cmd->add_option("--folds", cv.folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--grid-gamma-n", cv.gamma_n, "Grid of gamma_n values")->delimiter(',');
  cmd->add_option("--grid-gamma-r", cv.gamma_r, "Grid of gamma_r values")->delimiter(',');
  cmd->add_option("--grid-gamma-c", cv.gamma_c, "Grid of gamma_c values")->delimiter(',');
  cmd->add_option("--threads", cv.threads, "Worker threads for grid solves")
      ->capture_default_str();
}

struct ClipFlags {
  bool enabled = false;
  double lo = 1.0;
  double hi = 5.0;
  std::optional<gmc::ClipRange> get() const {
    if (!enabled) return std::nullopt;
    return gmc::ClipRange{lo, hi};
  }
};

void AddClipFlags(CLI::App* cmd, ClipFlags& clip) {
  cmd->add_flag("--clip", clip.enabled, "Clip predictions to [clip-lo, clip-hi] before scoring");
  cmd->add_option("--clip-lo", clip.lo)->capture_default_str();
  cmd->add_option("--clip-hi", clip.hi)->capture_default_str();
}

void PrintReport(const gmc::SolveReport& r) {
  std::cout << "iterations " << r.iterations_used << (r.converged ? " (converged)" : " (cap)")
            << "\nfinal_rho " << gmc::io::format_double(r.final_rho) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix completion on graphs: synthetic data, ingestion, solves, sweeps and CV"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.set_config("--config", "", "TOML/INI file of option values; command-line flags win");
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Global random seed")->capture_default_str();

  // synth
  cli::SynthOptions synth;
  std::string synth_out = synth.out_dir.string();
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic community dataset");
  synth_cmd->add_option("--rows", synth.rows)->capture_default_str();
  synth_cmd->add_option("--cols", synth.cols)->capture_default_str();
  synth_cmd->add_option("--row-communities", synth.row_communities)->capture_default_str();
  synth_cmd->add_option("--col-communities", synth.col_communities)->capture_default_str();
  synth_cmd->add_option("--k-intra", synth.k_intra, "Intra-community k-NN degree")
      ->capture_default_str();
  synth_cmd->add_option("--graph-error", synth.graph_error,
                        "Fraction of graph edges that cross communities")
      ->capture_default_str();
  synth_cmd->add_option("--noise-scale", synth.noise_scale,
                        "Discrete Laplace noise scale; 0 = noiseless")
      ->capture_default_str();
  synth_cmd->add_option("--sampling", synth.sampling, "uniform or powerlaw")
      ->check(CLI::IsMember({"uniform", "powerlaw"}))
      ->capture_default_str();
  synth_cmd->add_option("--fraction", synth.fraction,
                        "Observed fraction (uniform) or target density (powerlaw)")
      ->capture_default_str();
  synth_cmd->add_option("--epochs", synth.epochs, "Power-law epochs s; 0 = tune to --fraction")
      ->capture_default_str();
  synth_cmd->add_option("--out-dir", synth_out)->capture_default_str();

  // ingest
  cli::IngestOptions ingest;
  std::string ingest_in, ingest_out = ingest.out_dir.string();
  auto* ingest_cmd = app.add_subcommand("ingest", "Extract a dense block from a ratings file");
  ingest_cmd->add_option("--ratings", ingest_in, "user::item::rating[::timestamp] file")
      ->required();
  ingest_cmd->add_option("--delimiter", ingest.delimiter)->capture_default_str();
  ingest_cmd->add_option("--rows", ingest.target_rows)->capture_default_str();
  ingest_cmd->add_option("--cols", ingest.target_cols)->capture_default_str();
  ingest_cmd->add_option("--row-percentile", ingest.row_percentile)->capture_default_str();
  ingest_cmd->add_option("--col-percentile", ingest.col_percentile)->capture_default_str();
  ingest_cmd->add_option("--rating-min", ingest.rating_min)->capture_default_str();
  ingest_cmd->add_option("--rating-max", ingest.rating_max)->capture_default_str();
  ingest_cmd->add_option("--out-dir", ingest_out)->capture_default_str();

  // build-graph
  cli::BuildGraphOptions bg;
  std::string bg_features, bg_out = bg.out.string();
  PathFlag bg_summary;
  std::optional<double> bg_alpha;
  Index bg_entities = 0;
  auto* bg_cmd = app.add_subcommand("build-graph", "Build a side graph from a feature block");
  bg_cmd->add_option("--features", bg_features, "Triplets, one row per entity")->required();
  bg_cmd->add_option("--entities", bg_entities, "Entity count if the file has trailing gaps");
  bg_cmd->add_option("--method", bg.method, "epsilon or knn")
      ->check(CLI::IsMember({"epsilon", "knn"}))
      ->capture_default_str();
  bg_cmd->add_option("--epsilon", bg.epsilon)->capture_default_str();
  bg_cmd->add_option("--alpha", bg_alpha, "Kernel width; default puts weight 0.01 at epsilon");
  bg_cmd->add_option("--min-common", bg.min_common, "Minimum common support for a distance")
      ->capture_default_str();
  bg_cmd->add_flag("--exclude-zero-dmin", bg.exclude_zero_dmin,
                   "Anchor the kernel at the smallest positive distance");
  bg_cmd->add_option("-k,--k", bg.k, "Neighbours for knn")->capture_default_str();
  bg_cmd->add_option("--out", bg_out)->capture_default_str();
  bg_cmd->add_option("--summary", bg_summary.value, "Write a key,value summary CSV");

  // solve
  cli::SolveOptions solve;
  SolverFlags solve_extra;
  std::string solve_obs, solve_out = solve.out.string();
  PathFlag solve_rows, solve_cols, solve_test, solve_trace;
  ClipFlags solve_clip;
  auto* solve_cmd = app.add_subcommand("solve", "Run one ADMM solve");
  solve_cmd->add_option("--observations", solve_obs, "Observed triplets")->required();
  AddGraphFlags(solve_cmd, solve_rows, solve_cols);
  AddSolverFlags(solve_cmd, solve.solver, solve_extra);
  AddClipFlags(solve_cmd, solve_clip);
  solve_cmd->add_option("--test", solve_test.value, "Held-out triplets to score");
  solve_cmd->add_option("--out", solve_out, "Recovered matrix CSV")->capture_default_str();
  solve_cmd->add_option("--trace", solve_trace.value, "Per-iteration trace CSV");

  // sweep
  cli::SweepOptions sweep;
  SolverFlags sweep_extra;
  std::string sweep_truth, sweep_out = sweep.out.string(), sweep_sampling = "uniform";
  std::vector<std::string> sweep_variants{"nuclear", "graphs", "combined"};
  PathFlag sweep_rows, sweep_cols;
  ClipFlags sweep_clip;
  auto* sweep_cmd = app.add_subcommand("sweep", "RMSE against observation level");
  sweep_cmd->add_option("--truth", sweep_truth, "Complete ground-truth matrix CSV")->required();
  AddGraphFlags(sweep_cmd, sweep_rows, sweep_cols);
  sweep_cmd->add_option("--levels", sweep.sweep.levels, "Observed fractions of all cells")
      ->delimiter(',');
  sweep_cmd->add_option("--variants", sweep_variants, "nuclear, graphs, combined")
      ->delimiter(',');
  sweep_cmd->add_option("--test-fraction", sweep.sweep.test_fraction)->capture_default_str();
  sweep_cmd->add_option("--sampling", sweep_sampling, "uniform or powerlaw")
      ->check(CLI::IsMember({"uniform", "powerlaw"}))
      ->capture_default_str();
  AddCvFlags(sweep_cmd, sweep.sweep.cv);
  AddSolverFlags(sweep_cmd, sweep.sweep.solver, sweep_extra);
  AddClipFlags(sweep_cmd, sweep_clip);
  sweep_cmd->add_option("--out", sweep_out)->capture_default_str();

  // cv
  cli::CvOptions cv;
  SolverFlags cv_extra;
  std::string cv_obs, cv_out = cv.out.string(), cv_variant = "combined";
  PathFlag cv_rows, cv_cols;
  auto* cv_cmd = app.add_subcommand("cv", "Grid-search cross-validation");
  cv_cmd->add_option("--observations", cv_obs, "Training triplets")->required();
  AddGraphFlags(cv_cmd, cv_rows, cv_cols);
  cv_cmd->add_option("--variant", cv_variant, "nuclear, graphs or combined")
      ->check(CLI::IsMember({"nuclear", "graphs", "combined"}))
      ->capture_default_str();
  AddCvFlags(cv_cmd, cv.cv);
  AddSolverFlags(cv_cmd, cv.solver, cv_extra);
  cv_cmd->add_option("--out", cv_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      synth.seed = seed;
      synth.out_dir = synth_out;
      const auto a = cli::cmd_synth(synth);
      std::cout << "wrote " << synth.out_dir.string() << " (spec_hash " << a.spec_hash
                << ", density " << gmc::io::format_double(a.observations.density()) << ")\n";
    } else if (*ingest_cmd) {
      ingest.ratings = ingest_in;
      ingest.out_dir = ingest_out;
      const auto r = cli::cmd_ingest(ingest);
      std::cout << "density " << gmc::io::format_double(r.density) << '\n';
    } else if (*bg_cmd) {
      bg.features = bg_features;
      bg.out = bg_out;
      bg.alpha = bg_alpha;
      bg.summary = bg_summary.get();
      if (bg_entities > 0) bg.entities = bg_entities;
      const auto g = cli::cmd_build_graph(bg);
      std::cout << "edges " << g.n_edges() << '\n';
    } else if (*solve_cmd) {
      solve.observations = solve_obs;
      solve.graphs = {solve_rows.get(), solve_cols.get()};
      solve.test = solve_test.get();
      solve.trace = solve_trace.get();
      solve.clip = solve_clip.get();
      solve.out = solve_out;
      FinishSolver(solve.solver, solve_extra);
      const auto s = cli::cmd_solve(solve);
      PrintReport(s.report);
      std::cout << "train_rmse " << gmc::io::format_double(s.train_rmse) << '\n';
      if (s.test_rmse) std::cout << "test_rmse " << gmc::io::format_double(*s.test_rmse) << '\n';
    } else if (*sweep_cmd) {
      sweep.truth = sweep_truth;
      sweep.graphs = {sweep_rows.get(), sweep_cols.get()};
      sweep.out = sweep_out;
      sweep.sweep.seed = seed;
      sweep.sweep.cv.seed = seed;
      sweep.sweep.clip = sweep_clip.get();
      sweep.sweep.sampling = sweep_sampling == "powerlaw" ? gmc::SamplingKind::kPowerLaw
                                                          : gmc::SamplingKind::kUniform;
      sweep.sweep.variants.clear();
      for (const auto& v : sweep_variants) sweep.sweep.variants.push_back(gmc::parse_variant(v));
      FinishSolver(sweep.sweep.solver, sweep_extra);
      const auto res = cli::cmd_sweep(sweep);
      std::cout << "rows " << res.rows.size() << '\n';
    } else if (*cv_cmd) {
      cv.observations = cv_obs;
      cv.graphs = {cv_rows.get(), cv_cols.get()};
      cv.out = cv_out;
      cv.cv.seed = seed;
      cv.variant = gmc::parse_variant(cv_variant);
      FinishSolver(cv.solver, cv_extra);
      const auto res = cli::cmd_cv(cv);
      std::cout << "best gamma_n " << gmc::io::format_double(res.best.gamma_n) << " gamma_r "
                << gmc::io::format_double(res.best.gamma_r) << " gamma_c "
                << gmc::io::format_double(res.best.gamma_c) << " rmse "
                << gmc::io::format_double(res.best_rmse) << '\n';
    }
  } catch (const gmc::ParseError& err) {
    std::cerr << "gmc: parse error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "gmc: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
