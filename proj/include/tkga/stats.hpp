#pragma once

#include <cstddef>
#include <optional>

#include "tkga/kg.hpp"

namespace tkga {

enum class DensityBase { ValidEntities, AllEntities };

// When an aligned pair counts as temporally consistent.
enum class IntervalComparator {
  IdenticalYearSpan,    // same [min, max] year over the entity's known time points
  OverlappingYearSpan,  // the two year spans intersect
};

struct StatsConfig {
  DensityBase density = DensityBase::ValidEntities;
  IntervalComparator interval = IntervalComparator::IdenticalYearSpan;
};

struct GraphStats {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t facts = 0;
  std::size_t valid_facts = 0;
  std::size_t temporal_entities = 0;  // entities with at least one valid fact
  double density = 0.0;               // valid facts per entity of the chosen base
  std::optional<double> overlap_pct;  // entities that appear in a seed pair
};

// Undefined values (zero denominators) are nullopt.
struct DatasetStats {
  GraphStats source;
  GraphStats target;
  std::optional<double> mtf_pct;                   // mean valid-fact share of the two graphs
  std::optional<double> delta_facts_pct;           // relative to the smaller valid-fact count
  std::optional<double> delta_density_pct;         // relative to the smaller density
  std::optional<double> interval_consistency_pct;  // over all seed pairs
};

// [min, max] year over the known endpoints of e's valid facts.
std::optional<std::pair<int, int>> entity_year_span(EntityId e, const TemporalKG& kg);

DatasetStats dataset_stats(const TemporalKG& source, const TemporalKG& target,
                           const SeedAlignment& seeds, const StatsConfig& cfg = {});

}  // namespace tkga
