#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "tkga/pairs.hpp"
#include "tkga/reasoner.hpp"
#include "tkga/retrieval.hpp"
#include "tkga/similarity.hpp"

namespace tkga {

// One source entity with the candidates it is compared against at a scale.
// Contexts are working copies; interaction edits them in place of the KGs.
struct ScaleHyperedge {
  EntityId source;
  EntityContext source_context;
  std::vector<CandidateContext> candidates;  // presentation order
};

struct ScaleLayer {
  std::size_t scale = 1;
  std::vector<ScaleHyperedge> edges;  // ascending source handle
};

using ScaleLayers = std::array<ScaleLayer, 3>;

// Candidate contexts per scale:
//   1: the Top-k targets, each with the facts kept by its time or relation
//      projection;
//   2: the retrieved bank entries, each with the facts of that projection
//      (a raw target entry carries the full target context);
//   3: the distinct retrieved targets with their full context.
// Scores are similarity values P(source, target). Every context holds at
// most max_facts facts.
ScaleLayers build_scale_layers(const MultiScaleHypergraph& m, const SimilarityMatrix& p,
                               const TemporalKG& source, const TemporalKG& target,
                               std::span<const EntityId> sources, std::size_t max_facts);

struct ReasonerStats {
  std::size_t calls = 0;
  std::size_t failures = 0;  // transport errors; the pair was skipped
  std::size_t edits = 0;

  ReasonerStats& operator+=(const ReasonerStats& o) {
    calls += o.calls;
    failures += o.failures;
    edits += o.edits;
    return *this;
  }
};

// Asks the reasoner for edits on at most `budget` (source, candidate)
// pairs, visiting candidate rank 0 of every hyperedge, then rank 1, and so
// on. Replies are applied in source order; other pairs pass through.
ScaleLayer intra_scale_interaction(const ScaleLayer& layer, const ReasoningScope& scope,
                                   Reasoner& reasoner, std::size_t budget,
                                   std::size_t max_in_flight, ReasonerStats* stats = nullptr);

// One select call per hyperedge with candidates, in source order, for at
// most `budget` hyperedges. At most one target per source.
PairSet fusion_select_scale(const ScaleLayer& layer, const ReasoningScope& scope,
                            Reasoner& reasoner, std::size_t budget, std::size_t max_in_flight,
                            ReasonerStats* stats = nullptr);

// D and its per-source grouping C(s) (targets ascending).
struct ConflictSet {
  PairSet d;
  std::map<EntityId, std::vector<EntityId>> groups;

  bool empty() const noexcept { return d.empty(); }
};

// A pair is in conflict when another scale aligns its source to a
// different target.
ConflictSet detect_conflicts(const PairSet& phi1, const PairSet& phi2, const PairSet& phi3);

// One select call per conflicted source over its conflicting targets
// (ascending handle, full contexts, scores from p).
PairSet resolve_conflicts(const ConflictSet& conflicts, const ReasoningScope& scope,
                          Reasoner& reasoner, const SimilarityMatrix& p, std::size_t max_facts,
                          std::size_t max_in_flight, ReasonerStats* stats = nullptr);

// (phi1 ∩ phi2 ∩ phi3) ∪ phiC
PairSet fuse_final(const PairSet& phi1, const PairSet& phi2, const PairSet& phi3,
                   const PairSet& phi_c);

}  // namespace tkga
