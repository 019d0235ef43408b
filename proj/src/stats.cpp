#include "tkga/stats.hpp"

#include <algorithm>
#include <set>

namespace tkga {

namespace {

GraphStats graph_stats(const TemporalKG& kg, const std::set<EntityId>& seeded, DensityBase base) {
  GraphStats g;
  g.entities = kg.num_entities();
  g.relations = kg.num_relations();
  g.facts = kg.num_quadruples();
  g.valid_facts = kg.num_valid_quadruples();
  for (std::size_t e = 0; e < kg.num_entities(); ++e) {
    const auto inc = kg.incident(EntityId{e});
    if (std::any_of(inc.begin(), inc.end(), [&](std::size_t qi) { return kg.quadruple(qi).valid(); })) {
      ++g.temporal_entities;
    }
  }
  const auto denom = base == DensityBase::ValidEntities ? g.temporal_entities : g.entities;
  g.density = denom == 0 ? 0.0 : static_cast<double>(g.valid_facts) / static_cast<double>(denom);
  if (g.entities > 0) {
    g.overlap_pct = 100.0 * static_cast<double>(seeded.size()) / static_cast<double>(g.entities);
  }
  return g;
}

std::optional<double> relative_difference(double a, double b) {
  const double lo = std::min(a, b);
  if (lo <= 0.0) return std::nullopt;
  return 100.0 * (std::max(a, b) - lo) / lo;
}

bool consistent(const std::optional<std::pair<int, int>>& a,
                const std::optional<std::pair<int, int>>& b, IntervalComparator cmp) {
  if (!a || !b) return !a && !b;
  if (cmp == IntervalComparator::IdenticalYearSpan) return *a == *b;
  return a->first <= b->second && b->first <= a->second;
}

}  // namespace

std::optional<std::pair<int, int>> entity_year_span(EntityId e, const TemporalKG& kg) {
  std::optional<std::pair<int, int>> span;
  auto include = [&span](const TimePoint& t) {
    if (!t.known()) return;
    if (!span) {
      span = std::pair{t.year, t.year};
    } else {
      span->first = std::min(span->first, t.year);
      span->second = std::max(span->second, t.year);
    }
  };
  for (const auto qi : kg.incident(e)) {
    const auto& q = kg.quadruple(qi);
    include(q.interval.begin);
    include(q.interval.end);
  }
  return span;
}

DatasetStats dataset_stats(const TemporalKG& source, const TemporalKG& target,
                           const SeedAlignment& seeds, const StatsConfig& cfg) {
  std::set<EntityId> src_seeded;
  std::set<EntityId> tgt_seeded;
  for (const auto& p : seeds.pairs) {
    src_seeded.insert(p.source);
    tgt_seeded.insert(p.target);
  }
  DatasetStats s;
  s.source = graph_stats(source, src_seeded, cfg.density);
  s.target = graph_stats(target, tgt_seeded, cfg.density);

  if (s.source.facts > 0 && s.target.facts > 0) {
    const double a = static_cast<double>(s.source.valid_facts) / static_cast<double>(s.source.facts);
    const double b = static_cast<double>(s.target.valid_facts) / static_cast<double>(s.target.facts);
    s.mtf_pct = 100.0 * (a + b) / 2.0;
  }
  s.delta_facts_pct = relative_difference(static_cast<double>(s.source.valid_facts),
                                          static_cast<double>(s.target.valid_facts));
  s.delta_density_pct = relative_difference(s.source.density, s.target.density);

  if (!seeds.pairs.empty()) {
    std::size_t ok = 0;
    for (const auto& p : seeds.pairs) {
      ok += consistent(entity_year_span(p.source, source), entity_year_span(p.target, target), cfg.interval);
    }
    s.interval_consistency_pct = 100.0 * static_cast<double>(ok) / static_cast<double>(seeds.pairs.size());
  }
  return s;
}

}  // namespace tkga
