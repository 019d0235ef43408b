#include "tkga/similarity.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include <spdlog/spdlog.h>

#include "tkga/error.hpp"
#include "tkga/parallel.hpp"

namespace tkga {

std::vector<std::uint32_t> top_indices(std::span<const double> row, std::size_t k) {
  std::vector<std::uint32_t> idx(row.size());
  std::iota(idx.begin(), idx.end(), 0u);
  const auto n = std::min(k, idx.size());
  auto better = [&row](std::uint32_t a, std::uint32_t b) {
    return row[a] > row[b] || (row[a] == row[b] && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(n), idx.end(), better);
  idx.resize(n);
  return idx;
}

SimilarityMatrix::SimilarityMatrix(Matrix scores, std::size_t top_k, std::size_t k_csls)
    : scores_(std::move(scores)), top_k_(std::min(top_k, scores_.cols())), k_csls_(k_csls) {
  top_.resize(scores_.rows());
  parallel_for(scores_.rows(), [this](std::size_t r) { top_[r] = top_indices(row(r), top_k_); });
}

void SimilarityMatrix::dump(std::ostream& out) const {
  const std::uint32_t header[2] = {static_cast<std::uint32_t>(rows()),
                                   static_cast<std::uint32_t>(cols())};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  for (const double s : scores_.data()) {
    const auto f = static_cast<float>(s);
    out.write(reinterpret_cast<const char*>(&f), sizeof f);
  }
}

SimilarityMatrix SimilarityMatrix::load(std::istream& in, std::size_t top_k) {
  std::uint32_t header[2] = {0, 0};
  if (!in.read(reinterpret_cast<char*>(header), sizeof header)) {
    throw Error("similarity dump: truncated header");
  }
  Matrix m(header[0], header[1]);
  for (double& s : m.data()) {
    float f = 0.0F;
    if (!in.read(reinterpret_cast<char*>(&f), sizeof f)) throw Error("similarity dump: truncated");
    s = f;
  }
  return {std::move(m), top_k};
}

Matrix cosine_matrix(const Matrix& source, const Matrix& target) {
  if (source.cols() != target.cols()) throw LayoutError("embedding widths differ");
  const Matrix s = row_normalized(source);
  const Matrix t = row_normalized(target);
  Matrix out(s.rows(), t.rows());
  parallel_for(s.rows(), [&](std::size_t i) {
    for (std::size_t j = 0; j < t.rows(); ++j) out(i, j) = dot(s.row(i), t.row(j));
  });
  return out;
}

namespace {

double mean_top(std::vector<double>& values, std::size_t k) {
  if (k == 0) return 0.0;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(k - 1), values.end(),
                   std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += values[i];
  return sum / static_cast<double>(k);
}

}  // namespace

SimilarityMatrix csls_similarity(const Matrix& source, const Matrix& target, std::size_t k_csls,
                                 std::size_t top_k) {
  const Matrix cos = cosine_matrix(source, target);
  const std::size_t ns = cos.rows();
  const std::size_t nt = cos.cols();
  std::size_t k_t = k_csls;
  std::size_t k_s = k_csls;
  if (k_csls > nt || k_csls > ns) {
    spdlog::warn("k_csls={} exceeds graph size ({} source, {} target); clamping", k_csls, ns, nt);
    k_t = std::min(k_csls, nt);
    k_s = std::min(k_csls, ns);
  }

  std::vector<double> r_t(ns);
  std::vector<double> r_s(nt);
  parallel_for(ns, [&](std::size_t i) {
    std::vector<double> v(cos.row(i).begin(), cos.row(i).end());
    r_t[i] = mean_top(v, k_t);
  });
  parallel_for(nt, [&](std::size_t j) {
    std::vector<double> v(ns);
    for (std::size_t i = 0; i < ns; ++i) v[i] = cos(i, j);
    r_s[j] = mean_top(v, k_s);
  });

  Matrix scores(ns, nt);
  parallel_for(ns, [&](std::size_t i) {
    for (std::size_t j = 0; j < nt; ++j) scores(i, j) = 2.0 * cos(i, j) - r_t[i] - r_s[j];
  });
  return {std::move(scores), top_k, k_csls};
}

std::vector<AlignedPair> pseudo_pairs(const SimilarityMatrix& p) {
  std::vector<AlignedPair> out;
  if (p.cols() == 0) return out;
  out.reserve(p.rows());
  for (std::size_t r = 0; r < p.rows(); ++r) {
    const auto row = p.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    out.push_back({EntityId{r}, EntityId{best}});
  }
  return out;
}

}  // namespace tkga
