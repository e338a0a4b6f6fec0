#include "gmc/observations.hpp"

#include <algorithm>
#include <cmath>

namespace gmc {

namespace {

bool ColumnMajorLess(const Entry& a, const Entry& b) {
  return a.j != b.j ? a.j < b.j : a.i < b.i;
}

}  // namespace

SparseObservations::SparseObservations(Index rows, Index cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("observations: negative shape");
  for (const Entry& e : entries_) {
    if (e.i < 0 || e.j < 0 || e.i >= rows_ || e.j >= cols_) {
      throw std::invalid_argument("observations: entry (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + ") outside " +
                                  shape_string(rows_, cols_));
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument("observations: non-finite value at (" +
                                  std::to_string(e.i) + "," + std::to_string(e.j) + ")");
    }
  }
  std::sort(entries_.begin(), entries_.end(), ColumnMajorLess);
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].i == entries_[k - 1].i && entries_[k].j == entries_[k - 1].j) {
      throw std::invalid_argument("observations: duplicate entry (" +
                                  std::to_string(entries_[k].i) + "," +
                                  std::to_string(entries_[k].j) + ")");
    }
  }
}

SparseObservations SparseObservations::FromMask(const Matrix& dense, const Matrix& mask) {
  if (dense.rows() != mask.rows() || dense.cols() != mask.cols()) {
    throw DimensionError("observations: mask " + shape_string(mask.rows(), mask.cols()) +
                         " vs matrix " + shape_string(dense.rows(), dense.cols()));
  }
  std::vector<Entry> entries;
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      if (mask(i, j) != 0.0) entries.push_back({i, j, dense(i, j)});
    }
  }
  return SparseObservations(dense.rows(), dense.cols(), std::move(entries));
}

double SparseObservations::density() const {
  const double cells = static_cast<double>(rows_) * static_cast<double>(cols_);
  return cells > 0 ? static_cast<double>(entries_.size()) / cells : 0.0;
}

Matrix SparseObservations::Mask() const {
  Matrix mask = Matrix::Zero(rows_, cols_);
  for (const Entry& e : entries_) mask(e.i, e.j) = 1.0;
  return mask;
}

Matrix SparseObservations::MaskedValues() const {
  Matrix values = Matrix::Zero(rows_, cols_);
  for (const Entry& e : entries_) values(e.i, e.j) = e.value;
  return values;
}

SparseObservations SparseObservations::Select(const std::vector<std::size_t>& positions) const {
  std::vector<Entry> picked;
  picked.reserve(positions.size());
  for (std::size_t p : positions) picked.push_back(entries_.at(p));
  return SparseObservations(rows_, cols_, std::move(picked));
}

bool operator==(const SparseObservations& a, const SparseObservations& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.entries_.size() != b.entries_.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.entries_.size(); ++k) {
    const Entry& x = a.entries_[k];
    const Entry& y = b.entries_[k];
    if (x.i != y.i || x.j != y.j || x.value != y.value) return false;
  }
  return true;
}

}  // namespace gmc
