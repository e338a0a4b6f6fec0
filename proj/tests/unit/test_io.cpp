#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "gmc/io.hpp"
#include "test_util.hpp"

using namespace gmc;
using gmc::testing::RandomGraph;
using gmc::testing::RandomMatrix;
using gmc::testing::RandomObservations;

namespace {

template <class Fn>
std::int64_t ParseErrorLine(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& err) {
    return err.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("format_double round trips exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (double v : {0.1, -0.0, 1e-300, 5e-324, 1.0 / 3.0, 123456789.125}) {
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng);
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK_THROWS_AS(io::parse_double("1.5x"), ParseError);
  CHECK_THROWS_AS(io::parse_double(""), ParseError);
}

TEST_CASE("triplets round trip") {
  std::mt19937_64 rng(2);
  const Matrix m = RandomMatrix(9, 7, rng);
  const SparseObservations obs = RandomObservations(m, 0.4, rng);
  std::stringstream buf;
  io::write_triplets(buf, obs);
  CHECK(io::read_triplets(buf) == obs);

  // Trailing empty rows and columns survive through the shape header.
  const SparseObservations corner(5, 6, {{0, 0, 1.5}});
  std::stringstream buf2;
  io::write_triplets(buf2, corner);
  CHECK(io::read_triplets(buf2) == corner);
}

TEST_CASE("triplet parse errors carry line numbers") {
  std::stringstream dup("# shape 3 3\n0 0 1\n1 1 2\n0 0 3\n");
  CHECK(ParseErrorLine([&] { io::read_triplets(dup); }) == 4);
  std::stringstream bad("0 0 1\n0 1\n");
  CHECK(ParseErrorLine([&] { io::read_triplets(bad); }) == 2);
  std::stringstream neg("0 -1 1\n");
  CHECK(ParseErrorLine([&] { io::read_triplets(neg); }) == 1);
  std::stringstream out_of_range("# shape 2 2\n5 0 1\n");
  CHECK_THROWS_AS(io::read_triplets(out_of_range), ParseError);
}

TEST_CASE("edge lists round trip and reject bad edges") {
  std::mt19937_64 rng(3);
  const WeightedGraph g = RandomGraph(25, 0.2, rng);
  std::stringstream buf;
  io::write_edge_list(buf, g);
  const WeightedGraph back = io::read_edge_list(buf);
  CHECK(back.n_vertices() == 25);
  REQUIRE(back.n_edges() == g.n_edges());
  for (Index k = 0; k < g.n_edges(); ++k) {
    CHECK(back.edges()[k].u == g.edges()[k].u);
    CHECK(back.edges()[k].v == g.edges()[k].v);
    CHECK(back.edges()[k].w == g.edges()[k].w);
  }
  std::stringstream loop("0 1 1\n2 2 1\n");
  CHECK(ParseErrorLine([&] { io::read_edge_list(loop); }) == 2);
  std::stringstream dup("0 1 1\n1 0 1\n");
  CHECK(ParseErrorLine([&] { io::read_edge_list(dup); }) == 2);
  std::stringstream neg("0 1 -1\n");
  CHECK(ParseErrorLine([&] { io::read_edge_list(neg); }) == 1);
}

TEST_CASE("dense CSV round trips bit for bit") {
  std::mt19937_64 rng(4);
  const Matrix m = RandomMatrix(6, 11, rng, -1e3, 1e3);
  std::stringstream buf;
  io::write_dense_csv(buf, m);
  CHECK(io::read_dense_csv(buf) == m);
  std::stringstream ragged("1,2,3\n4,5\n");
  CHECK(ParseErrorLine([&] { io::read_dense_csv(ragged); }) == 2);
}

TEST_CASE("ratings round trip with and without timestamps") {
  const std::vector<io::Rating> ratings{
      {"1", "122", 5.0, 838985046}, {"1", "185", 4.5, std::nullopt}, {"42", "7", 0.5, 1}};
  for (const std::string delim : {"::", "\t", ","}) {
    std::stringstream buf;
    io::write_ratings(buf, ratings, delim);
    const auto back = io::read_ratings(buf, delim);
    REQUIRE(back.size() == ratings.size());
    for (std::size_t k = 0; k < ratings.size(); ++k) {
      CHECK(back[k].user == ratings[k].user);
      CHECK(back[k].item == ratings[k].item);
      CHECK(back[k].rating == ratings[k].rating);
      CHECK(back[k].timestamp == ratings[k].timestamp);
    }
  }
}

TEST_CASE("ratings parse errors") {
  std::stringstream empty("");
  CHECK_THROWS_AS(io::read_ratings(empty), ParseError);
  std::stringstream short_line("1::2::3\n1::2\n");
  CHECK(ParseErrorLine([&] { io::read_ratings(short_line); }) == 2);
  std::stringstream bad_rating("1::2::x\n");
  CHECK(ParseErrorLine([&] { io::read_ratings(bad_rating); }) == 1);
  std::stringstream bad_ts("1::2::3\n\n1::3::4::soon\n");
  CHECK(ParseErrorLine([&] { io::read_ratings(bad_ts); }) == 3);
}

TEST_CASE("files: id maps round trip and parent directories are created") {
  const auto dir = std::filesystem::temp_directory_path() / "gmc_io_test";
  std::filesystem::remove_all(dir);
  const std::vector<std::string> ids{"10", "abc", "7"};
  io::write_id_map(dir / "nested" / "ids.txt", ids);
  CHECK(io::read_id_map(dir / "nested" / "ids.txt") == ids);

  const SparseObservations obs(3, 3, {{2, 1, 4.0}});
  io::write_triplets(dir / "t.txt", obs);
  CHECK(io::read_triplets(dir / "t.txt") == obs);
  CHECK_THROWS(io::read_triplets(dir / "missing.txt"));
  std::filesystem::remove_all(dir);
}
