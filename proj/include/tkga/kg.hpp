#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tkga/time.hpp"

namespace tkga {

// Dense 0..N-1 handle, distinct per kind.
template <typename Tag>
struct Handle {
  std::uint32_t value = 0;

  constexpr Handle() = default;
  constexpr explicit Handle(std::uint32_t v) : value(v) {}
  constexpr explicit Handle(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
  constexpr std::size_t index() const noexcept { return value; }

  auto operator<=>(const Handle&) const = default;
};

using EntityId = Handle<struct EntityTag>;
using RelationId = Handle<struct RelationTag>;

// Bijective label <-> handle table.
class Vocabulary {
 public:
  std::uint32_t intern(std::string_view label);
  std::optional<std::uint32_t> find(std::string_view label) const;
  const std::string& label(std::uint32_t id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }

  // Throws IntegrityError when the two directions disagree.
  void check_bijection() const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Quadruple {
  EntityId head;
  RelationId rel;
  EntityId tail;
  TimeInterval interval;

  // A valid quadruple carries a time interval.
  bool valid() const noexcept { return !interval.is_none(); }

  bool operator==(const Quadruple&) const = default;
};

// Immutable temporal knowledge graph (E, R, T, Q) with an entity -> incident
// fact index and the global year span of its known time points.
class TemporalKG {
 public:
  class Builder {
   public:
    EntityId entity(std::string_view label);
    RelationId relation(std::string_view label);
    void add(EntityId head, RelationId rel, EntityId tail, TimeInterval interval);
    void add(std::string_view head, std::string_view rel, std::string_view tail,
             TimeInterval interval);
    TemporalKG build() &&;

   private:
    Vocabulary entities_;
    Vocabulary relations_;
    std::vector<Quadruple> quads_;
  };

  TemporalKG() = default;

  // Tab-separated `head rel tail begin end`; blank lines and lines starting
  // with '#' are skipped (a '#' that opens a time field is the sentinel).
  static TemporalKG parse(std::istream& in);
  static TemporalKG parse_file(const std::filesystem::path& path);

  // Writes every fact in canonical form, one per line, in storage order.
  void write(std::ostream& out) const;

  std::size_t num_entities() const noexcept { return entities_.size(); }
  std::size_t num_relations() const noexcept { return relations_.size(); }
  std::size_t num_quadruples() const noexcept { return quads_.size(); }
  std::size_t num_valid_quadruples() const noexcept { return num_valid_; }

  const std::vector<Quadruple>& quadruples() const noexcept { return quads_; }
  const Quadruple& quadruple(std::size_t i) const { return quads_.at(i); }

  // Indices of quadruples where e is head or tail (self-loops listed once).
  std::span<const std::size_t> incident(EntityId e) const;

  const std::string& entity_label(EntityId e) const { return entities_.label(e.value); }
  const std::string& relation_label(RelationId r) const { return relations_.label(r.value); }
  std::optional<EntityId> find_entity(std::string_view label) const;
  std::optional<RelationId> find_relation(std::string_view label) const;

  const TimeSpan& span() const noexcept { return span_; }

  // Re-checks label bijection and that the adjacency index covers Q exactly.
  void validate() const;

 private:
  void index();

  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Quadruple> quads_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<std::size_t> adjacency_;
  std::size_t num_valid_ = 0;
  TimeSpan span_;
};

enum class Split : std::uint8_t { Train, Test };

struct SeedPair {
  EntityId source;
  EntityId target;
  Split split = Split::Train;

  bool operator==(const SeedPair&) const = default;
};

struct SeedAlignment {
  std::vector<SeedPair> pairs;

  std::vector<SeedPair> train() const;
  std::vector<SeedPair> test() const;
};

// `src\ttgt` per line, every pair tagged with `split`.
SeedAlignment parse_seeds(std::istream& in, const TemporalKG& source, const TemporalKG& target,
                          Split split);
SeedAlignment parse_seed_file(const std::filesystem::path& path, const TemporalKG& source,
                              const TemporalKG& target, Split split);
void write_seeds(std::ostream& out, const std::vector<SeedPair>& pairs, const TemporalKG& source,
                 const TemporalKG& target);

// The train split must be 1-to-1. Throws IntegrityError otherwise.
void validate_train_split(const SeedAlignment& seeds);

// Binary vector over T_g: bit i is set iff e is head or tail of a fact whose
// begin or end decomposes to index i.
std::vector<std::uint8_t> temporal_signature(EntityId e, Granularity g, const TemporalKG& kg,
                                             const TimeSpan& span);
std::vector<std::uint8_t> temporal_signature(EntityId e, Granularity g, const TemporalKG& kg);

// Sorted, unique active indices at g over an explicit fact subset.
std::vector<std::size_t> active_time_indices(std::span<const Quadruple> facts, Granularity g,
                                             const TimeSpan& span);

// Incident facts of e ordered valid-first, then by begin time, then by
// relation label; at most max_facts entries.
std::vector<std::size_t> entity_context(EntityId e, const TemporalKG& kg, std::size_t max_facts);

}  // namespace tkga

template <typename Tag>
struct std::hash<tkga::Handle<Tag>> {
  std::size_t operator()(const tkga::Handle<Tag>& h) const noexcept {
    return std::hash<std::uint32_t>{}(h.value);
  }
};
