#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tkga/kg.hpp"
#include "tkga/projection.hpp"

namespace tkga {

// One fact seen from an entity: relation, the entity on the other end and
// whether the entity is the head. Handles are local to the fact's graph.
struct ContextFact {
  RelationId rel;
  EntityId other;
  bool outgoing = true;
  TimeInterval interval;

  bool operator==(const ContextFact&) const = default;
};

// Working copy of an entity's facts. Edits change the copy, never the graph.
struct EntityContext {
  EntityId entity;
  std::vector<ContextFact> facts;
};

EntityContext make_context(EntityId e, const TemporalKG& kg, std::span<const std::size_t> facts);
// Up to max_facts incident facts in entity_context order.
EntityContext make_context(EntityId e, const TemporalKG& kg, std::size_t max_facts);

struct CandidateContext {
  EntityContext context;
  double score = 0.0;  // similarity of (source, candidate)
};

enum class Side : std::uint8_t { Source, Candidate };

struct FactEdit {
  enum class Op : std::uint8_t { Add, Remove };
  Op op = Op::Add;
  Side side = Side::Candidate;
  ContextFact fact;

  bool operator==(const FactEdit&) const = default;
};

// Adds append; a remove drops one matching occurrence (no-op if absent).
void apply_edits(std::span<const FactEdit> edits, EntityContext& source, EntityContext& candidate);

// Graph pair a reasoner works against.
struct ReasoningScope {
  const TemporalKG* source = nullptr;
  const TemporalKG* target = nullptr;
  const RelationBridge* bridge = nullptr;
};

// Decides which candidate (if any) a source aligns with and proposes fact
// edits for a (source, candidate) pair. Implementations must be safe to
// call from several threads at once.
class Reasoner {
 public:
  virtual ~Reasoner() = default;
  // Index into candidates, or nullopt for "none". Transport problems throw.
  virtual std::optional<std::size_t> select(const ReasoningScope& scope,
                                            const EntityContext& source,
                                            std::span<const CandidateContext> candidates) = 0;
  virtual std::vector<FactEdit> augment(const ReasoningScope& scope, const EntityContext& source,
                                        const CandidateContext& candidate) = 0;
};

// Distinct (source relation, year) pairs of the source matched by a
// candidate fact with an equivalent relation and the same year. Years are
// those of known interval endpoints.
std::size_t matched_pairs(const ReasoningScope& scope, const EntityContext& source,
                          const EntityContext& candidate);

// Deterministic rules.
// select: the candidate with the most matched pairs, at least one, ties
// by higher score then lower position.
// augment: for each timed source fact whose relation has an equivalent
// timeless fact on the candidate, add that candidate fact with the source
// interval; remove timed candidate facts with an equivalent source relation
// whose years all fall outside the source's [min, max] year span.
class MockReasoner final : public Reasoner {
 public:
  std::optional<std::size_t> select(const ReasoningScope& scope, const EntityContext& source,
                                    std::span<const CandidateContext> candidates) override;
  std::vector<FactEdit> augment(const ReasoningScope& scope, const EntityContext& source,
                                const CandidateContext& candidate) override;
};

// Always answers "none" and proposes nothing.
class AbstainingReasoner final : public Reasoner {
 public:
  std::optional<std::size_t> select(const ReasoningScope&, const EntityContext&,
                                    std::span<const CandidateContext>) override {
    return std::nullopt;
  }
  std::vector<FactEdit> augment(const ReasoningScope&, const EntityContext&,
                                const CandidateContext&) override {
    return {};
  }
};

}  // namespace tkga
