#pragma once

#include <vector>

#include "gmc/types.hpp"

namespace gmc {

struct Entry {
  Index i = 0;
  Index j = 0;
  double value = 0.0;
};

// Observed entries of an m x n matrix. Entries are kept sorted column-major
// (by j, then i) and unique, so the mask A_Omega is exactly their support.
class SparseObservations {
 public:
  SparseObservations() = default;
  // Validates ranges, finiteness and uniqueness of (i, j).
  SparseObservations(Index rows, Index cols, std::vector<Entry> entries);

  // Keeps the entries of dense where mask is nonzero.
  static SparseObservations FromMask(const Matrix& dense, const Matrix& mask);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  double density() const;

  // 0/1 mask with ones on the support.
  Matrix Mask() const;
  // Observed values placed in an m x n matrix, zero elsewhere (A_Omega o M).
  Matrix MaskedValues() const;

  // Subset by entry position, e.g. for folds and splits.
  SparseObservations Select(const std::vector<std::size_t>& positions) const;

  friend bool operator==(const SparseObservations& a, const SparseObservations& b);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace gmc
