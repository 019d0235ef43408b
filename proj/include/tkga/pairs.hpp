#pragma once

#include <compare>
#include <set>
#include <vector>

#include "tkga/kg.hpp"

namespace tkga {

// (source entity, target entity), ordered by source then target handle.
struct AlignedPair {
  EntityId source;
  EntityId target;

  auto operator<=>(const AlignedPair&) const = default;
};

using PairSet = std::set<AlignedPair>;

inline PairSet to_pair_set(const std::vector<AlignedPair>& pairs) {
  return {pairs.begin(), pairs.end()};
}

}  // namespace tkga
