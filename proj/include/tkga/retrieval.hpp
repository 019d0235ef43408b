#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tkga/alignment.hpp"
#include "tkga/projection.hpp"

namespace tkga {

// Fused vector of a projection: temporal blocks from the retained facts
// only, name and structural blocks from the target entity. Throws
// StateError if the model has not been trained.
std::vector<double> embed_projection(const Projection& p, const AlignmentModel& model,
                                     const GraphViews& target_views, const TemporalKG& target,
                                     const TimeSpan& span);

enum class IndexMode : std::uint8_t { Exact, Approx };

struct BankConfig {
  IndexMode mode = IndexMode::Exact;
  bool include_raw_targets = false;
  std::size_t nlist = 0;   // coarse clusters for Approx; 0 picks sqrt(size)
  std::size_t nprobe = 4;  // clusters scanned per query
  std::uint64_t seed = 1;
};

struct BankEntry {
  std::uint32_t id = 0;                 // projection id, or num_projections + target for raw
  EntityId target;
  std::optional<ProjectionKind> kind;   // nullopt for a raw target entry
  std::vector<double> vector;           // unit norm (zero stays zero)
};

struct Retrieved {
  std::uint32_t entry = 0;  // index into MemoryBank::entries()
  double score = 0.0;
};

// Cosine top-k store over projection embeddings. Immutable once built.
class MemoryBank {
 public:
  static MemoryBank build(const ProjectionHypergraph& g, const AlignmentModel& model,
                          const GraphViews& target_views, const TemporalKG& target,
                          const TimeSpan& span, const BankConfig& cfg = {});
  // Direct construction from vectors (ids ascending, unit-normalized here).
  static MemoryBank from_entries(std::vector<BankEntry> entries, const BankConfig& cfg = {});

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<BankEntry>& entries() const noexcept { return entries_; }
  const BankEntry& entry(std::uint32_t i) const { return entries_.at(i); }
  IndexMode mode() const noexcept { return cfg_.mode; }

  // Highest cosine first, ties by entry id; k is clamped to the size.
  std::vector<Retrieved> retrieve(std::span<const double> query, std::size_t k) const;

  // FNV-1a over ids, targets, kinds and vector bytes.
  std::uint64_t checksum() const;

  // Per entry: u32 id, u32 label length, label bytes, u8 kind (2 = raw),
  // u32 dimension, float32 components.
  void dump(std::ostream& out, const TemporalKG& target) const;

 private:
  void build_index();

  BankConfig cfg_;
  std::size_t dim_ = 0;
  std::vector<BankEntry> entries_;
  std::vector<std::vector<double>> centroids_;
  std::vector<std::vector<std::uint32_t>> lists_;
};

struct RetrievalHyperedge {
  EntityId source;
  std::vector<Retrieved> hits;  // bank entries, best first
};

struct TargetHyperedge {
  EntityId source;
  std::vector<EntityId> targets;  // distinct, in first-retrieved order
};

// L1 is the projection hypergraph, L2 the retrieved entries per source and
// L3 their target entities with duplicates collapsed.
struct MultiScaleHypergraph {
  const ProjectionHypergraph* l1 = nullptr;
  const MemoryBank* bank = nullptr;
  std::vector<RetrievalHyperedge> l2;
  std::vector<TargetHyperedge> l3;

  // Distinct bank entries over all L2 hyperedges.
  std::vector<std::uint32_t> l2_nodes() const;
  // Distinct targets over all L3 hyperedges.
  std::vector<EntityId> l3_nodes() const;
};

// Queries are the fused source embeddings, one row per source entity.
MultiScaleHypergraph build_multiscale(const ProjectionHypergraph& g, const MemoryBank& bank,
                                      const Matrix& queries, std::size_t k_r);

}  // namespace tkga
