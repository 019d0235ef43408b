#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tkga/kg.hpp"
#include "tkga/similarity.hpp"

namespace tkga {

// Cross-graph relation equivalence. Without explicit entries, relations
// match by identical label.
class RelationMap {
 public:
  static RelationMap exact_label() { return {}; }
  // An explicit map with no entries: nothing matches.
  static RelationMap none();
  // `src_rel\ttgt_rel` lines; each line adds one equivalence.
  static RelationMap parse(std::istream& in);
  static RelationMap parse_file(const std::filesystem::path& path);

  void add(std::string_view source_rel, std::string_view target_rel);
  bool is_explicit() const noexcept { return explicit_; }
  bool matches(std::string_view source_rel, std::string_view target_rel) const;
  void write(std::ostream& out) const;

 private:
  bool explicit_ = false;
  std::set<std::pair<std::string, std::string>> pairs_;
};

// A RelationMap resolved against one source/target graph pair: for every
// target relation, the source relations it is equivalent to.
class RelationBridge {
 public:
  RelationBridge() = default;
  RelationBridge(const RelationMap& map, const TemporalKG& source, const TemporalKG& target);

  std::span<const RelationId> sources_of(RelationId target_rel) const {
    return classes_[target_rel.index()];
  }
  bool matches(RelationId source_rel, RelationId target_rel) const;

 private:
  std::vector<std::vector<RelationId>> classes_;
};

enum class ProjectionKind : std::uint8_t { Time = 0, Rel = 1 };

// Target facts surviving a mask relative to one source entity. Fact
// indices refer to the target graph and are sorted.
struct Projection {
  ProjectionKind kind = ProjectionKind::Time;
  EntityId source;
  EntityId target;
  std::vector<std::size_t> facts;
  std::uint32_t id = 0;

  bool empty() const noexcept { return facts.empty(); }
};

// Known begin/end points of the valid facts incident to e, sorted and unique.
std::vector<TimePoint> entity_timestamps(EntityId e, const TemporalKG& kg);
// Relations of the facts incident to e.
std::set<RelationId> entity_relations(EntityId e, const TemporalKG& kg);

// Keeps the valid facts with at least one known endpoint that matches some
// stamp at the coarser of the two granularities.
std::vector<std::size_t> mask_time(std::span<const std::size_t> facts, const TemporalKG& kg,
                                   std::span<const TimePoint> stamps);
// Keeps the facts whose relation is equivalent to one of `relations`.
std::vector<std::size_t> mask_rel(std::span<const std::size_t> facts, const TemporalKG& kg,
                                  const std::set<RelationId>& relations,
                                  const RelationBridge& bridge);

Projection project_time(EntityId source, EntityId target, const TemporalKG& source_kg,
                        const TemporalKG& target_kg);
Projection project_rel(EntityId source, EntityId target, const TemporalKG& source_kg,
                       const TemporalKG& target_kg, const RelationBridge& bridge);
Projection project_rel(EntityId source, EntityId target, const TemporalKG& source_kg,
                       const TemporalKG& target_kg, const RelationMap& map);

// H^p(e^s) = {e^s} + Top-k(e^s) + the 2k projections of those targets.
struct ProjectionHyperedge {
  EntityId source;
  std::vector<EntityId> targets;            // similarity order
  std::vector<std::uint32_t> projections;   // (time, rel) per target, in target order

  std::size_t size() const noexcept { return 1 + targets.size() + projections.size(); }
};

// Layer-1 hypergraph. Hypernodes are every target entity plus every
// projection (empty ones included); projection ids index `projections`.
struct ProjectionHypergraph {
  std::size_t num_targets = 0;
  std::size_t k = 0;
  std::vector<Projection> projections;
  std::vector<ProjectionHyperedge> edges;  // one per source row of P

  std::size_t num_hypernodes() const noexcept { return num_targets + projections.size(); }
  const Projection& projection(std::uint32_t id) const { return projections.at(id); }
};

// The k best targets of source row `source`, ties by handle; k is clamped
// to the number of targets.
std::vector<EntityId> topk_targets(EntityId source, const SimilarityMatrix& p, std::size_t k);

ProjectionHypergraph build_projection_hypergraph(const SimilarityMatrix& p, std::size_t k,
                                                 const TemporalKG& source,
                                                 const TemporalKG& target,
                                                 const RelationBridge& bridge);

}  // namespace tkga
