#include "gmc/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace gmc::io {

namespace {

std::ofstream OpenOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitWs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

Index ParseIndex(std::string_view text, std::int64_t line) {
  Index v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("expected an integer index, got '" + std::string(text) + "'", line);
  }
  if (v < 0) throw ParseError("negative index " + std::string(text), line);
  return v;
}

void CheckStream(std::ostream& out) {
  if (!out) throw std::runtime_error("write failed");
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text, std::int64_t line) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("expected a number, got '" + std::string(text) + "'", line);
  }
  return v;
}

void write_triplets(std::ostream& out, const SparseObservations& obs) {
  out << "# shape " << obs.rows() << ' ' << obs.cols() << '\n';
  for (const Entry& e : obs.entries()) {
    out << e.i << ' ' << e.j << ' ' << format_double(e.value) << '\n';
  }
  CheckStream(out);
}

void write_triplets(const std::filesystem::path& path, const SparseObservations& obs) {
  auto out = OpenOut(path);
  write_triplets(out, obs);
}

SparseObservations read_triplets(std::istream& in, std::optional<std::pair<Index, Index>> shape) {
  std::optional<std::pair<Index, Index>> header;
  std::vector<Entry> entries;
  std::set<std::pair<Index, Index>> seen;
  std::string raw;
  std::int64_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = Trim(raw);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto fields = SplitWs(text.substr(1));
      if (fields.size() == 3 && fields[0] == "shape") {
        header = {ParseIndex(fields[1], line), ParseIndex(fields[2], line)};
      }
      continue;
    }
    const auto fields = SplitWs(text);
    if (fields.size() != 3) throw ParseError("expected 'i j value'", line);
    Entry e{ParseIndex(fields[0], line), ParseIndex(fields[1], line),
            parse_double(fields[2], line)};
    if (!seen.insert({e.i, e.j}).second) {
      throw ParseError("duplicate entry (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")",
                       line);
    }
    entries.push_back(e);
  }
  std::pair<Index, Index> dims{0, 0};
  if (shape) {
    dims = *shape;
  } else if (header) {
    dims = *header;
  } else {
    for (const Entry& e : entries) {
      dims.first = std::max(dims.first, e.i + 1);
      dims.second = std::max(dims.second, e.j + 1);
    }
  }
  try {
    return SparseObservations(dims.first, dims.second, std::move(entries));
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  }
}

SparseObservations read_triplets(const std::filesystem::path& path,
                                 std::optional<std::pair<Index, Index>> shape) {
  auto in = OpenIn(path);
  try {
    return read_triplets(in, shape);
  } catch (const ParseError& err) {
    throw ParseError(path.string() + ": " + err.what());
  }
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  out << "# vertices " << g.n_vertices() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
  CheckStream(out);
}

void write_edge_list(const std::filesystem::path& path, const WeightedGraph& g) {
  auto out = OpenOut(path);
  write_edge_list(out, g);
}

WeightedGraph read_edge_list(std::istream& in, std::optional<Index> n_vertices) {
  std::optional<Index> header;
  std::vector<Edge> edges;
  std::set<std::pair<Index, Index>> seen;
  std::string raw;
  std::int64_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = Trim(raw);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto fields = SplitWs(text.substr(1));
      if (fields.size() == 2 && fields[0] == "vertices") header = ParseIndex(fields[1], line);
      continue;
    }
    const auto fields = SplitWs(text);
    if (fields.size() != 3) throw ParseError("expected 'u v w'", line);
    Edge e{ParseIndex(fields[0], line), ParseIndex(fields[1], line), parse_double(fields[2], line)};
    if (e.u == e.v) throw ParseError("self-loop at vertex " + std::to_string(e.u), line);
    if (!(e.w >= 0.0)) throw ParseError("negative edge weight", line);
    if (!seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second) {
      throw ParseError("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")",
                       line);
    }
    edges.push_back(e);
  }
  Index n = 0;
  if (n_vertices) {
    n = *n_vertices;
  } else if (header) {
    n = *header;
  } else {
    for (const Edge& e : edges) n = std::max({n, e.u + 1, e.v + 1});
  }
  try {
    return WeightedGraph(n, std::move(edges));
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  }
}

WeightedGraph read_edge_list(const std::filesystem::path& path, std::optional<Index> n_vertices) {
  auto in = OpenIn(path);
  try {
    return read_edge_list(in, n_vertices);
  } catch (const ParseError& err) {
    throw ParseError(path.string() + ": " + err.what());
  }
}

void write_dense_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  CheckStream(out);
}

void write_dense_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = OpenOut(path);
  write_dense_csv(out, m);
}

Matrix read_dense_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::int64_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = Trim(raw);
    if (text.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = text.find(',', pos);
      const auto field = Trim(text.substr(pos, comma == std::string_view::npos ? text.size() - pos
                                                                               : comma - pos));
      row.push_back(parse_double(field, line));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged row: " + std::to_string(row.size()) + " fields, expected " +
                           std::to_string(rows.front().size()),
                       line);
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix read_dense_csv(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  try {
    return read_dense_csv(in);
  } catch (const ParseError& err) {
    throw ParseError(path.string() + ": " + err.what());
  }
}

std::vector<Rating> read_ratings(std::istream& in, const std::string& delimiter) {
  if (delimiter.empty()) throw std::invalid_argument("read_ratings: empty delimiter");
  std::vector<Rating> out;
  std::string raw;
  std::int64_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = Trim(raw);
    if (text.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      const auto hit = text.find(delimiter, pos);
      fields.push_back(Trim(text.substr(pos, hit == std::string_view::npos ? text.size() - pos
                                                                           : hit - pos)));
      if (hit == std::string_view::npos) break;
      pos = hit + delimiter.size();
    }
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError("expected user" + delimiter + "item" + delimiter + "rating[" + delimiter +
                           "timestamp], got " + std::to_string(fields.size()) + " fields",
                       line);
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty user or item id", line);
    Rating r;
    r.user = std::string(fields[0]);
    r.item = std::string(fields[1]);
    r.rating = parse_double(fields[2], line);
    if (fields.size() == 4) {
      std::int64_t ts = 0;
      const auto* end = fields[3].data() + fields[3].size();
      const auto [ptr, ec] = std::from_chars(fields[3].data(), end, ts);
      if (ec != std::errc() || ptr != end) {
        throw ParseError("bad timestamp '" + std::string(fields[3]) + "'", line);
      }
      r.timestamp = ts;
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ParseError("ratings input contains no records");
  return out;
}

std::vector<Rating> read_ratings(const std::filesystem::path& path, const std::string& delimiter) {
  auto in = OpenIn(path);
  try {
    return read_ratings(in, delimiter);
  } catch (const ParseError& err) {
    throw ParseError(path.string() + ": " + err.what());
  }
}

void write_ratings(std::ostream& out, const std::vector<Rating>& ratings,
                   const std::string& delimiter) {
  for (const Rating& r : ratings) {
    out << r.user << delimiter << r.item << delimiter << format_double(r.rating);
    if (r.timestamp) out << delimiter << *r.timestamp;
    out << '\n';
  }
  CheckStream(out);
}

void write_id_map(const std::filesystem::path& path, const std::vector<std::string>& ids) {
  auto out = OpenOut(path);
  for (const auto& id : ids) out << id << '\n';
  CheckStream(out);
}

std::vector<std::string> read_id_map(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  std::vector<std::string> ids;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto text = Trim(raw);
    if (!text.empty()) ids.emplace_back(text);
  }
  return ids;
}

}  // namespace gmc::io
