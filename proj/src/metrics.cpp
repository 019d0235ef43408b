#include "tkga/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "tkga/error.hpp"
#include "tkga/parallel.hpp"
#include "tkga/rng.hpp"

namespace tkga {

RankReport hits_mrr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw MetricError("no ranks to aggregate");
  RankReport r;
  r.ranks.assign(ranks.begin(), ranks.end());
  std::size_t h1 = 0, h5 = 0, h10 = 0;
  double rr = 0.0;
  for (const auto k : ranks) {
    if (k == 0) throw MetricError("ranks start at 1");
    h1 += k <= 1;
    h5 += k <= 5;
    h10 += k <= 10;
    rr += 1.0 / static_cast<double>(k);
  }
  const auto n = static_cast<double>(ranks.size());
  r.hits1 = static_cast<double>(h1) / n;
  r.hits5 = static_cast<double>(h5) / n;
  r.hits10 = static_cast<double>(h10) / n;
  r.mrr = rr / n;
  return r;
}

std::size_t rank_of(const SimilarityMatrix& p, EntityId source, EntityId target, const Pins& pins) {
  if (source.index() >= p.rows() || target.index() >= p.cols()) {
    throw MetricError("test pair outside the similarity matrix");
  }
  const auto row = p.row(source.index());
  const auto t = target.index();
  std::optional<std::size_t> pinned;
  if (const auto it = pins.find(source); it != pins.end()) {
    if (it->second == target) return 1;
    pinned = it->second.index();
  }
  const double st = row[t];
  std::size_t rank = pinned ? 2 : 1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j == t || (pinned && j == *pinned)) continue;
    if (row[j] > st || (row[j] == st && j < t)) ++rank;
  }
  return rank;
}

RankReport evaluate(const SimilarityMatrix& p, std::span<const SeedPair> test, const Pins& pins) {
  std::vector<std::size_t> ranks(test.size());
  parallel_for(test.size(), [&](std::size_t i) {
    ranks[i] = rank_of(p, test[i].source, test[i].target, pins);
  });
  return hits_mrr(ranks);
}

std::vector<std::size_t> inject_noise(Matrix& embeddings, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("noise_ratio", "must lie in [0, 1]");
  const auto n = embeddings.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng pick(seed);
  pick.shuffle(order.begin(), order.end());
  const auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  order.resize(std::min(count, n));
  for (const auto r : order) {
    // Each row's values come from its own stream, so they do not depend on ratio.
    Rng values(mix_seed(seed, r));
    for (double& x : embeddings.row(r)) x = values.uniform(-1.0, 1.0);
  }
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace tkga
