#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tkga/linalg.hpp"
#include "tkga/pairs.hpp"

namespace tkga {

// Dense source x target score matrix with a per-row top-k index.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  // Builds the top-k index over the given scores (ties by lower column).
  SimilarityMatrix(Matrix scores, std::size_t top_k, std::size_t k_csls = 0);

  std::size_t rows() const noexcept { return scores_.rows(); }
  std::size_t cols() const noexcept { return scores_.cols(); }
  double operator()(std::size_t r, std::size_t c) const { return scores_(r, c); }
  std::span<const double> row(std::size_t r) const { return scores_.row(r); }
  const Matrix& scores() const noexcept { return scores_; }

  std::size_t top_k() const noexcept { return top_k_; }
  std::size_t k_csls() const noexcept { return k_csls_; }
  std::span<const std::uint32_t> top(std::size_t r) const { return top_[r]; }

  // uint32 rows, uint32 cols, then row-major float32 scores.
  void dump(std::ostream& out) const;
  static SimilarityMatrix load(std::istream& in, std::size_t top_k);

 private:
  Matrix scores_;
  std::size_t top_k_ = 0;
  std::size_t k_csls_ = 0;
  std::vector<std::vector<std::uint32_t>> top_;
};

// Columns of `row` ordered by descending score, ties by lower column; the
// first min(k, row.size()) entries.
std::vector<std::uint32_t> top_indices(std::span<const double> row, std::size_t k);

// Plain cosine matrix between the rows of two embedding sets.
Matrix cosine_matrix(const Matrix& source, const Matrix& target);

// CSLS(x, y) = 2 cos(x, y) - r_T(x) - r_S(y) with neighbourhood k_csls
// (clamped to the opposite side's size with a warning). Rows are computed
// in parallel.
SimilarityMatrix csls_similarity(const Matrix& source, const Matrix& target, std::size_t k_csls,
                                 std::size_t top_k = 10);

// Per-row argmax, ties to the lowest target handle. Rows of a matrix with
// no columns yield nothing.
std::vector<AlignedPair> pseudo_pairs(const SimilarityMatrix& p);

}  // namespace tkga
