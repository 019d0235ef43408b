#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tkga/kg.hpp"
#include "tkga/linalg.hpp"
#include "tkga/similarity.hpp"

namespace tkga {

struct RankReport {
  std::vector<std::size_t> ranks;  // one per test pair, in input order
  double hits1 = 0.0;
  double hits5 = 0.0;
  double hits10 = 0.0;
  double mrr = 0.0;
};

// Throws MetricError for an empty input or a rank of 0.
RankReport hits_mrr(std::span<const std::size_t> ranks);

// Fused pairs forced to the top of their source row.
using Pins = std::map<EntityId, EntityId>;

// Rank of `target` in row `source`: higher score first, ties by lower
// column. A pinned target of that source comes before everything else.
std::size_t rank_of(const SimilarityMatrix& p, EntityId source, EntityId target, const Pins& pins);

RankReport evaluate(const SimilarityMatrix& p, std::span<const SeedPair> test, const Pins& pins = {});

// Replaces floor(ratio * rows) rows, chosen by a seeded shuffle, with
// uniform vectors in [-1, 1]^cols. A larger ratio with the same seed
// replaces a superset of rows. Returns the replaced rows in ascending order.
std::vector<std::size_t> inject_noise(Matrix& embeddings, double ratio, std::uint64_t seed);

}  // namespace tkga
