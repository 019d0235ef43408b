#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tkga/kg.hpp"
#include "tkga/rng.hpp"

namespace tkga {

struct WalkConfig {
  double beta = 0.5;                 // weight of moving to a node at distance 2 from the previous one
  std::size_t walk_length = 20;      // entities per path
  std::size_t walks_per_entity = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Token {
  enum class Kind : std::uint8_t { Entity, Relation };
  Kind kind = Kind::Entity;
  std::uint32_t id = 0;

  static Token entity(std::uint32_t id) { return {Kind::Entity, id}; }
  static Token relation(std::uint32_t id) { return {Kind::Relation, id}; }

  auto operator<=>(const Token&) const = default;
};

// Alternating entity / relation tokens: e1 r1 e2 ... r_{l-1} e_l.
using Walk = std::vector<Token>;

// Undirected entity graph used for walks. Parallel edges keep every
// relation that links a node pair; self-loops are dropped.
class WalkGraph {
 public:
  static WalkGraph from_kg(const TemporalKG& kg);

  // One graph over source and target entities in which every anchor pair is
  // merged into a single node (transitively). Target relations are numbered
  // after the source relations.
  static WalkGraph joint(const TemporalKG& source, const TemporalKG& target,
                         std::span<const std::pair<EntityId, EntityId>> anchors);

  std::size_t num_nodes() const noexcept { return neighbors_.size(); }
  std::size_t num_relations() const noexcept { return num_relations_; }

  std::span<const std::uint32_t> neighbors(std::uint32_t node) const { return neighbors_[node]; }
  bool adjacent(std::uint32_t a, std::uint32_t b) const;
  // Relations on the edges between a and b (empty when not adjacent).
  std::span<const std::uint32_t> relations_between(std::uint32_t a, std::uint32_t b) const;

  // Node of a graph entity. For from_kg graphs use source_node.
  std::uint32_t source_node(EntityId e) const { return node_of_source_.at(e.index()); }
  std::uint32_t target_node(EntityId e) const { return node_of_target_.at(e.index()); }

 private:
  void add_edge(std::uint32_t a, std::uint32_t b, std::uint32_t rel);
  void finalize();

  std::vector<std::vector<std::uint32_t>> neighbors_;
  std::vector<std::vector<std::vector<std::uint32_t>>> edge_relations_;
  std::size_t num_relations_ = 0;
  std::vector<std::uint32_t> node_of_source_;
  std::vector<std::uint32_t> node_of_target_;
};

// Next-node distribution from `current` given `previous` (nullopt on the
// first step, which is uniform). Probabilities are normalized over the
// neighbors of `current` other than `previous`: 1-beta for candidates also
// adjacent to `previous`, beta otherwise. Candidates are in neighbor order.
std::vector<std::pair<std::uint32_t, double>> transition_distribution(
    std::optional<std::uint32_t> previous, std::uint32_t current, const WalkConfig& cfg,
    const WalkGraph& graph);

std::optional<std::uint32_t> sample_step(std::optional<std::uint32_t> previous,
                                         std::uint32_t current, const WalkConfig& cfg,
                                         const WalkGraph& graph, Rng& rng);

// One biased walk. Ends early when no candidate remains. Throws Error if
// `start` has no neighbor.
Walk sample_walk(std::uint32_t start, const WalkConfig& cfg, const WalkGraph& graph, Rng& rng);
Walk sample_walk(EntityId start, const WalkConfig& cfg, const TemporalKG& kg);

// walks_per_entity walks per non-isolated node. Each start node draws from
// its own stream derived from (seed, node), so the corpus is reproducible
// and could be generated per node in any order.
std::vector<Walk> build_corpus(const WalkGraph& graph, const WalkConfig& cfg);
std::vector<Walk> build_corpus(const TemporalKG& kg, const WalkConfig& cfg);

// One path per line, tokens as E<id> / R<id>.
void write_corpus(std::ostream& out, const std::vector<Walk>& corpus);

}  // namespace tkga
