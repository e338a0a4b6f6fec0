#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gmc/synthgen.hpp"

namespace gmc::cli {

using json = nlohmann::json;
using io::format_double;

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

namespace {

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void WriteManifest(const fs::path& path, const std::string& command, std::uint64_t seed,
                   const std::string& spec_hash, json params, json artifacts) {
  json m;
  m["tool"] = "gmc";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["spec_hash"] = spec_hash;
  m["parameters"] = std::move(params);
  m["artifacts"] = std::move(artifacts);
  WriteText(path, m.dump(2) + "\n");
}

struct LoadedGraphs {
  std::optional<WeightedGraph> rows;
  std::optional<WeightedGraph> cols;

  GraphRegularizers View() const {
    GraphRegularizers g;
    if (rows) g.rows.emplace(*rows);
    if (cols) g.cols.emplace(*cols);
    return g;
  }
};

LoadedGraphs LoadGraphs(const GraphInputs& in, Index m, Index n) {
  LoadedGraphs out;
  if (in.row_graph) {
    out.rows = io::read_edge_list(*in.row_graph);
    if (out.rows->n_vertices() != m) {
      throw DimensionError("row graph " + in.row_graph->string() + " has " +
                           std::to_string(out.rows->n_vertices()) + " vertices but the matrix has " +
                           std::to_string(m) + " rows");
    }
  }
  if (in.col_graph) {
    out.cols = io::read_edge_list(*in.col_graph);
    if (out.cols->n_vertices() != n) {
      throw DimensionError("column graph " + in.col_graph->string() + " has " +
                           std::to_string(out.cols->n_vertices()) +
                           " vertices but the matrix has " + std::to_string(n) + " columns");
    }
  }
  return out;
}

bool ParseInteger(const std::string& s, long long& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool IdLess(const std::string& a, const std::string& b) {
  long long x = 0, y = 0;
  if (ParseInteger(a, x) && ParseInteger(b, y)) return x < y;
  return a < b;
}

}  // namespace

std::string SynthOptions::Canonical() const {
  std::ostringstream out;
  out << "rows=" << rows << "\ncols=" << cols << "\nrow_communities=" << row_communities
      << "\ncol_communities=" << col_communities << "\nk_intra=" << k_intra
      << "\ngraph_error=" << format_double(graph_error)
      << "\nnoise_scale=" << format_double(noise_scale) << "\nsampling=" << sampling
      << "\nfraction=" << format_double(fraction) << "\nepochs=" << format_double(epochs)
      << "\nseed=" << seed << "\n";
  return out.str();
}

SynthArtifacts make_synth(const SynthOptions& opt) {
  if (opt.sampling != "uniform" && opt.sampling != "powerlaw") {
    throw std::invalid_argument("synth: sampling must be 'uniform' or 'powerlaw'");
  }
  if (opt.noise_scale < 0.0) throw std::invalid_argument("synth: noise scale must be >= 0");
  SynthArtifacts a;
  const CommunitySpec spec = default_community_spec(opt.rows, opt.cols, opt.row_communities,
                                                    opt.col_communities,
                                                    derive_seed(opt.seed, 1));
  a.row_communities = spec.row_community_sizes;
  a.col_communities = spec.col_community_sizes;
  a.truth = generate_matrix(spec);

  auto make_graph = [&](const std::vector<Index>& sizes, std::uint64_t embed_seed,
                        std::uint64_t er_seed) {
    const WeightedGraph intra = intra_community_graph(sizes, opt.k_intra, embed_seed);
    GraphNoiseSpec noise;
    noise.k_intra = opt.k_intra;
    noise.error_probability =
        error_probability_for_fraction(intra.n_edges(), cross_community_pairs(sizes),
                                       opt.graph_error);
    noise.seed = er_seed;
    return generate_community_graph(sizes, noise, embed_seed);
  };
  a.row_graph = make_graph(spec.row_community_sizes, derive_seed(opt.seed, 2),
                           derive_seed(opt.seed, 4));
  a.col_graph = make_graph(spec.col_community_sizes, derive_seed(opt.seed, 3),
                           derive_seed(opt.seed, 5));

  if (opt.noise_scale > 0.0) {
    NoiseSpec noise;
    noise.scale = opt.noise_scale;
    noise.seed = derive_seed(opt.seed, 6);
    a.matrix = add_laplacian_noise(a.truth, noise);
  } else {
    a.matrix = a.truth;
  }

  SamplingSpec sampling;
  sampling.seed = derive_seed(opt.seed, 7);
  if (opt.sampling == "uniform") {
    sampling.mode = UniformSampling{opt.fraction};
  } else {
    const double s = opt.epochs > 0.0
                         ? opt.epochs
                         : tune_power_law_epochs(opt.rows, opt.cols, opt.fraction);
    sampling.mode = PowerLawSampling{s};
  }
  a.observations = sample_observations(a.matrix, sampling);
  a.spec_hash = fnv1a_hex(opt.Canonical());
  return a;
}

SynthArtifacts cmd_synth(const SynthOptions& opt) {
  SynthArtifacts a = make_synth(opt);
  const fs::path dir = opt.out_dir;
  fs::create_directories(dir);
  io::write_dense_csv(dir / "truth.csv", a.truth);
  io::write_dense_csv(dir / "matrix.csv", a.matrix);
  io::write_triplets(dir / "observations.txt", a.observations);
  io::write_edge_list(dir / "row_graph.edges", a.row_graph);
  io::write_edge_list(dir / "col_graph.edges", a.col_graph);

  json params;
  params["rows"] = opt.rows;
  params["cols"] = opt.cols;
  params["row_communities"] = opt.row_communities;
  params["col_communities"] = opt.col_communities;
  params["k_intra"] = opt.k_intra;
  params["graph_error"] = opt.graph_error;
  params["noise_scale"] = opt.noise_scale;
  params["sampling"] = opt.sampling;
  params["fraction"] = opt.fraction;
  params["epochs"] = opt.epochs;
  params["row_community_sizes"] = a.row_communities;
  params["col_community_sizes"] = a.col_communities;
  json artifacts;
  artifacts["truth"] = "truth.csv";
  artifacts["matrix"] = "matrix.csv";
  artifacts["observations"] = "observations.txt";
  artifacts["row_graph"] = "row_graph.edges";
  artifacts["col_graph"] = "col_graph.edges";
  artifacts["observed_density"] = a.observations.density();
  WriteManifest(dir / "manifest.json", "synth", opt.seed, a.spec_hash, params, artifacts);
  return a;
}

std::vector<std::pair<std::string, Index>> count_by(const std::vector<io::Rating>& ratings,
                                                    bool by_user) {
  std::map<std::string, std::size_t> slot;
  std::vector<std::pair<std::string, Index>> out;
  for (const io::Rating& r : ratings) {
    const std::string& id = by_user ? r.user : r.item;
    auto [it, inserted] = slot.emplace(id, out.size());
    if (inserted) out.emplace_back(id, 0);
    ++out[it->second].second;
  }
  return out;
}

std::vector<std::string> select_near_percentile(
    const std::vector<std::pair<std::string, Index>>& frequencies, Index count,
    double percentile) {
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    throw std::invalid_argument("percentile must lie in [0, 100]");
  }
  const auto total = static_cast<Index>(frequencies.size());
  if (count < 1 || count > total) {
    throw std::invalid_argument("cannot select " + std::to_string(count) + " of " +
                                std::to_string(total) + " entities");
  }
  auto sorted = frequencies;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : IdLess(a.first, b.first);
  });
  const auto centre =
      static_cast<Index>(std::llround(percentile / 100.0 * static_cast<double>(total - 1)));
  const Index start = std::clamp<Index>(centre - count / 2, 0, total - count);
  std::vector<std::string> picked;
  for (Index k = start; k < start + count; ++k) picked.push_back(sorted[k].first);
  return picked;
}

IngestResult ingest_ratings(const std::vector<io::Rating>& ratings, const IngestOptions& opt) {
  if (!(opt.rating_min <= opt.rating_max)) {
    throw std::invalid_argument("ingest: rating range is empty");
  }
  for (std::size_t k = 0; k < ratings.size(); ++k) {
    const double r = ratings[k].rating;
    if (!(r >= opt.rating_min && r <= opt.rating_max)) {
      throw std::invalid_argument("ingest: record " + std::to_string(k + 1) + " has rating " +
                                  format_double(r) + " outside [" +
                                  format_double(opt.rating_min) + ", " +
                                  format_double(opt.rating_max) + "]");
    }
  }
  IngestResult out;
  const auto user_freq = count_by(ratings, true);
  const auto movie_freq = count_by(ratings, false);
  if (static_cast<Index>(user_freq.size()) < opt.target_rows) {
    throw std::invalid_argument("ingest: only " + std::to_string(user_freq.size()) +
                                " users, " + std::to_string(opt.target_rows) + " requested");
  }
  if (static_cast<Index>(movie_freq.size()) < opt.target_cols) {
    throw std::invalid_argument("ingest: only " + std::to_string(movie_freq.size()) +
                                " movies, " + std::to_string(opt.target_cols) + " requested");
  }
  out.users = select_near_percentile(user_freq, opt.target_rows, opt.row_percentile);
  out.movies = select_near_percentile(movie_freq, opt.target_cols, opt.col_percentile);

  std::map<std::string, Index> user_row, movie_col;
  for (std::size_t k = 0; k < out.users.size(); ++k) user_row[out.users[k]] = static_cast<Index>(k);
  for (std::size_t k = 0; k < out.movies.size(); ++k) {
    movie_col[out.movies[k]] = static_cast<Index>(k);
  }
  // Feature columns: non-selected ids, ordered by id.
  std::map<std::string, Index, decltype(&IdLess)> other_movie(&IdLess), other_user(&IdLess);
  for (const auto& [id, c] : movie_freq) {
    if (!movie_col.contains(id)) other_movie.emplace(id, 0);
  }
  for (const auto& [id, c] : user_freq) {
    if (!user_row.contains(id)) other_user.emplace(id, 0);
  }
  Index next = 0;
  for (auto& [id, idx] : other_movie) {
    idx = next++;
    out.user_feature_items.push_back(id);
  }
  next = 0;
  for (auto& [id, idx] : other_user) {
    idx = next++;
    out.movie_feature_users.push_back(id);
  }

  std::vector<Entry> m, fu, fm;
  for (const io::Rating& r : ratings) {
    const auto u = user_row.find(r.user);
    const auto v = movie_col.find(r.item);
    if (u != user_row.end() && v != movie_col.end()) {
      m.push_back({u->second, v->second, r.rating});
    } else if (u != user_row.end()) {
      fu.push_back({u->second, other_movie.at(r.item), r.rating});
    } else if (v != movie_col.end()) {
      fm.push_back({v->second, other_user.at(r.user), r.rating});
    }
    // Neither selected: the discarded block.
  }
  out.m = SparseObservations(opt.target_rows, opt.target_cols, std::move(m));
  out.user_features = SparseObservations(opt.target_rows,
                                         static_cast<Index>(out.user_feature_items.size()),
                                         std::move(fu));
  out.movie_features = SparseObservations(opt.target_cols,
                                          static_cast<Index>(out.movie_feature_users.size()),
                                          std::move(fm));
  out.density = out.m.density();
  return out;
}

IngestResult cmd_ingest(const IngestOptions& opt) {
  // Everything is parsed and validated before the first file is written.
  const auto ratings = io::read_ratings(opt.ratings, opt.delimiter);
  IngestResult res = ingest_ratings(ratings, opt);
  const fs::path dir = opt.out_dir;
  fs::create_directories(dir);
  io::write_triplets(dir / "M.txt", res.m);
  io::write_triplets(dir / "Fu.txt", res.user_features);
  io::write_triplets(dir / "Fm.txt", res.movie_features);
  io::write_id_map(dir / "users.ids", res.users);
  io::write_id_map(dir / "movies.ids", res.movies);
  io::write_id_map(dir / "fu_items.ids", res.user_feature_items);
  io::write_id_map(dir / "fm_users.ids", res.movie_feature_users);

  json params;
  params["ratings"] = opt.ratings.string();
  params["delimiter"] = opt.delimiter;
  params["target_rows"] = opt.target_rows;
  params["target_cols"] = opt.target_cols;
  params["row_percentile"] = opt.row_percentile;
  params["col_percentile"] = opt.col_percentile;
  params["rating_min"] = opt.rating_min;
  params["rating_max"] = opt.rating_max;
  json artifacts;
  artifacts["M"] = "M.txt";
  artifacts["user_features"] = "Fu.txt";
  artifacts["movie_features"] = "Fm.txt";
  artifacts["users"] = "users.ids";
  artifacts["movies"] = "movies.ids";
  artifacts["user_feature_items"] = "fu_items.ids";
  artifacts["movie_feature_users"] = "fm_users.ids";
  artifacts["density"] = res.density;
  WriteManifest(dir / "manifest.json", "ingest", 0, fnv1a_hex(params.dump()), params, artifacts);
  return res;
}

WeightedGraph cmd_build_graph(const BuildGraphOptions& opt) {
  SparseObservations obs = io::read_triplets(opt.features);
  if (opt.entities && *opt.entities != obs.rows()) {
    if (*opt.entities < obs.rows()) {
      throw DimensionError("build-graph: feature file has " + std::to_string(obs.rows()) +
                           " entities, more than --entities " + std::to_string(*opt.entities));
    }
    obs = SparseObservations(*opt.entities, obs.cols(), obs.entries());
  }
  const FeatureBlock block(std::move(obs));
  WeightedGraph g;
  std::ostringstream summary;
  summary << "key,value\n";
  if (opt.method == "epsilon") {
    SideGraphConfig cfg;
    cfg.epsilon = opt.epsilon;
    cfg.alpha = opt.alpha;
    cfg.min_common = opt.min_common;
    cfg.exclude_zero_dmin = opt.exclude_zero_dmin;
    SideGraphSummary s;
    g = build_side_graph(block, cfg, &s);
    summary << "d_min," << format_double(s.d_min) << "\nalpha," << format_double(s.alpha)
            << "\nepsilon," << format_double(s.epsilon) << "\ndefined_pairs," << s.defined_pairs
            << "\nedge_count," << s.edge_count << "\n";
    for (const auto& [q, d] : s.quantiles) {
      summary << "q" << format_double(q) << "," << format_double(d) << "\n";
    }
  } else if (opt.method == "knn") {
    const PairwiseDistances d = pairwise_distances(block, opt.min_common);
    Matrix dist = d.dist;
    for (Index k = 0; k < dist.size(); ++k) {
      if (std::isnan(dist.data()[k])) dist.data()[k] = std::numeric_limits<double>::infinity();
    }
    g = build_knn_graph(dist, opt.k, KnnWeights::kBinary);
    summary << "k," << opt.k << "\nedge_count," << g.n_edges() << "\n";
  } else {
    throw std::invalid_argument("build-graph: method must be 'epsilon' or 'knn'");
  }
  io::write_edge_list(opt.out, g);
  if (opt.summary) WriteText(*opt.summary, summary.str());
  return g;
}

SolveSummary cmd_solve(const SolveOptions& opt) {
  const SparseObservations obs = io::read_triplets(opt.observations);
  const LoadedGraphs graphs = LoadGraphs(opt.graphs, obs.rows(), obs.cols());
  SolveSummary out;
  out.report = admm_solve(obs, graphs.View(), opt.solver);
  out.train_rmse = obs.empty() ? 0.0 : rmse(out.report.recovered, obs, opt.clip);
  if (opt.test) {
    const SparseObservations test = io::read_triplets(*opt.test, std::pair{obs.rows(), obs.cols()});
    out.test_rmse = rmse(out.report.recovered, test, opt.clip);
  }
  io::write_dense_csv(opt.out, out.report.recovered);
  if (opt.trace) {
    std::ostringstream t;
    t << "iteration,objective,primal_res,dual_res,rank_estimate,rho,cg_iters,cg_rel_res\n";
    for (const TraceRecord& r : out.report.trace) {
      t << r.iteration << ',' << format_double(r.objective) << ','
        << format_double(r.primal_residual) << ',' << format_double(r.dual_residual) << ','
        << r.rank << ',' << format_double(r.rho) << ',' << r.cg_iterations << ','
        << format_double(r.cg_relative_residual) << '\n';
    }
    WriteText(*opt.trace, t.str());
  }
  return out;
}

void write_sweep_csv(const fs::path& path, const SweepResult& result) {
  std::ostringstream out;
  out << "level,variant,gamma_n,gamma_r,gamma_c,rmse_test,iters,seconds\n";
  for (const SweepRow& r : result.rows) {
    out << format_double(r.level) << ',' << to_string(r.variant) << ','
        << format_double(r.cell.gamma_n) << ',' << format_double(r.cell.gamma_r) << ','
        << format_double(r.cell.gamma_c) << ',' << format_double(r.rmse_test) << ',' << r.iters
        << ',' << format_double(r.seconds) << '\n';
  }
  WriteText(path, out.str());
}

SweepResult cmd_sweep(const SweepOptions& opt) {
  const Matrix truth = io::read_dense_csv(opt.truth);
  const LoadedGraphs graphs = LoadGraphs(opt.graphs, truth.rows(), truth.cols());
  SweepResult res = observation_sweep(truth, graphs.View(), opt.sweep);
  write_sweep_csv(opt.out, res);
  return res;
}

CVResult cmd_cv(const CvOptions& opt) {
  const SparseObservations obs = io::read_triplets(opt.observations);
  const LoadedGraphs graphs = LoadGraphs(opt.graphs, obs.rows(), obs.cols());
  CVResult res = cross_validate(obs, graphs.View(), opt.cv, opt.variant, opt.solver);
  std::ostringstream out;
  out << "gamma_n,gamma_r,gamma_c,mean_rmse,best\n";
  for (const CVCellResult& c : res.table) {
    out << format_double(c.cell.gamma_n) << ',' << format_double(c.cell.gamma_r) << ','
        << format_double(c.cell.gamma_c) << ',' << format_double(c.mean_rmse) << ','
        << (c.cell == res.best ? 1 : 0) << '\n';
  }
  WriteText(opt.out, out.str());
  return res;
}

}  // namespace gmc::cli
