#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gmc/graphs.hpp"
#include "gmc/observations.hpp"

namespace gmc::io {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, std::int64_t line = 0);

// Triplets: "i j value" per line, 0-based. Written with a leading
// "# shape <rows> <cols>" comment; readers take the shape from that line
// unless one is given explicitly.
void write_triplets(std::ostream& out, const SparseObservations& obs);
void write_triplets(const std::filesystem::path& path, const SparseObservations& obs);
SparseObservations read_triplets(std::istream& in, std::optional<std::pair<Index, Index>> shape = {});
SparseObservations read_triplets(const std::filesystem::path& path,
                                 std::optional<std::pair<Index, Index>> shape = {});

// Edge lists: "u v w" per line, '#' comments, "# vertices <n>" header.
// Self-loops and repeated pairs are rejected with their line numbers.
void write_edge_list(std::ostream& out, const WeightedGraph& g);
void write_edge_list(const std::filesystem::path& path, const WeightedGraph& g);
WeightedGraph read_edge_list(std::istream& in, std::optional<Index> n_vertices = {});
WeightedGraph read_edge_list(const std::filesystem::path& path,
                             std::optional<Index> n_vertices = {});

// Headerless comma-separated dense matrix, one row per line.
void write_dense_csv(std::ostream& out, const Matrix& m);
void write_dense_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_dense_csv(std::istream& in);
Matrix read_dense_csv(const std::filesystem::path& path);

// One rating record of an external ratings file.
struct Rating {
  std::string user;
  std::string item;
  double rating = 0.0;
  std::optional<std::int64_t> timestamp;
};

// user<delim>item<delim>rating[<delim>timestamp]; "::" by default. Blank
// lines are skipped; anything else malformed raises ParseError with the
// line number. An input without any record is an error.
std::vector<Rating> read_ratings(std::istream& in, const std::string& delimiter = "::");
std::vector<Rating> read_ratings(const std::filesystem::path& path,
                                 const std::string& delimiter = "::");
void write_ratings(std::ostream& out, const std::vector<Rating>& ratings,
                   const std::string& delimiter = "::");

// Dense index -> external id, one id per line in index order.
void write_id_map(const std::filesystem::path& path, const std::vector<std::string>& ids);
std::vector<std::string> read_id_map(const std::filesystem::path& path);

}  // namespace gmc::io
