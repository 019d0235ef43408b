#include "tkga/projection.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "tkga/error.hpp"
#include "tkga/parallel.hpp"

namespace tkga {

RelationMap RelationMap::none() {
  RelationMap m;
  m.explicit_ = true;
  return m;
}

RelationMap RelationMap::parse(std::istream& in) {
  RelationMap m = none();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(line_no, "expected src_rel<TAB>tgt_rel");
    }
    m.add(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1));
  }
  return m;
}

RelationMap RelationMap::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse(in);
}

void RelationMap::add(std::string_view source_rel, std::string_view target_rel) {
  explicit_ = true;
  pairs_.emplace(std::string(source_rel), std::string(target_rel));
}

bool RelationMap::matches(std::string_view source_rel, std::string_view target_rel) const {
  if (!explicit_) return source_rel == target_rel;
  return pairs_.contains({std::string(source_rel), std::string(target_rel)});
}

void RelationMap::write(std::ostream& out) const {
  for (const auto& [s, t] : pairs_) out << s << '\t' << t << '\n';
}

RelationBridge::RelationBridge(const RelationMap& map, const TemporalKG& source,
                               const TemporalKG& target) {
  classes_.resize(target.num_relations());
  for (std::size_t t = 0; t < target.num_relations(); ++t) {
    const auto& tl = target.relation_label(RelationId{t});
    if (!map.is_explicit()) {
      if (const auto s = source.find_relation(tl)) classes_[t].push_back(*s);
      continue;
    }
    for (std::size_t s = 0; s < source.num_relations(); ++s) {
      if (map.matches(source.relation_label(RelationId{s}), tl)) {
        classes_[t].push_back(RelationId{s});
      }
    }
  }
}

bool RelationBridge::matches(RelationId source_rel, RelationId target_rel) const {
  const auto cls = sources_of(target_rel);
  return std::find(cls.begin(), cls.end(), source_rel) != cls.end();
}

std::vector<TimePoint> entity_timestamps(EntityId e, const TemporalKG& kg) {
  std::vector<TimePoint> out;
  for (const auto qi : kg.incident(e)) {
    const auto& q = kg.quadruple(qi);
    if (q.interval.begin.known()) out.push_back(q.interval.begin);
    if (q.interval.end.known()) out.push_back(q.interval.end);
  }
  std::sort(out.begin(), out.end(),
            [](const TimePoint& a, const TimePoint& b) { return chrono_compare(a, b) < 0; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<RelationId> entity_relations(EntityId e, const TemporalKG& kg) {
  std::set<RelationId> out;
  for (const auto qi : kg.incident(e)) out.insert(kg.quadruple(qi).rel);
  return out;
}

std::vector<std::size_t> mask_time(std::span<const std::size_t> facts, const TemporalKG& kg,
                                   std::span<const TimePoint> stamps) {
  std::vector<std::size_t> out;
  auto hit = [&stamps](const TimePoint& t) {
    return t.known() && std::any_of(stamps.begin(), stamps.end(),
                                    [&t](const TimePoint& s) { return matches_at_coarsest(t, s); });
  };
  for (const auto qi : facts) {
    const auto& iv = kg.quadruple(qi).interval;
    if (hit(iv.begin) || hit(iv.end)) out.push_back(qi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> mask_rel(std::span<const std::size_t> facts, const TemporalKG& kg,
                                  const std::set<RelationId>& relations,
                                  const RelationBridge& bridge) {
  std::vector<std::size_t> out;
  for (const auto qi : facts) {
    const auto cls = bridge.sources_of(kg.quadruple(qi).rel);
    if (std::any_of(cls.begin(), cls.end(), [&](RelationId r) { return relations.contains(r); })) {
      out.push_back(qi);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Projection project_time(EntityId source, EntityId target, const TemporalKG& source_kg,
                        const TemporalKG& target_kg) {
  const auto stamps = entity_timestamps(source, source_kg);
  return {ProjectionKind::Time, source, target, mask_time(target_kg.incident(target), target_kg, stamps),
          0};
}

Projection project_rel(EntityId source, EntityId target, const TemporalKG& source_kg,
                       const TemporalKG& target_kg, const RelationBridge& bridge) {
  return {ProjectionKind::Rel, source, target,
          mask_rel(target_kg.incident(target), target_kg, entity_relations(source, source_kg),
                   bridge),
          0};
}

Projection project_rel(EntityId source, EntityId target, const TemporalKG& source_kg,
                       const TemporalKG& target_kg, const RelationMap& map) {
  return project_rel(source, target, source_kg, target_kg,
                     RelationBridge(map, source_kg, target_kg));
}

std::vector<EntityId> topk_targets(EntityId source, const SimilarityMatrix& p, std::size_t k) {
  if (k == 0) throw ConfigError("k", "must be at least 1");
  std::vector<std::uint32_t> top;
  if (p.top_k() >= std::min(k, p.cols())) {
    const auto cached = p.top(source.index());
    top.assign(cached.begin(), cached.begin() + static_cast<long>(std::min(k, p.cols())));
  } else {
    top = top_indices(p.row(source.index()), k);
  }
  std::vector<EntityId> out;
  out.reserve(top.size());
  for (const auto t : top) out.push_back(EntityId{t});
  return out;
}

ProjectionHypergraph build_projection_hypergraph(const SimilarityMatrix& p, std::size_t k,
                                                 const TemporalKG& source,
                                                 const TemporalKG& target,
                                                 const RelationBridge& bridge) {
  ProjectionHypergraph g;
  g.num_targets = target.num_entities();
  g.k = std::min(k, p.cols());
  g.edges.resize(p.rows());
  g.projections.resize(p.rows() * g.k * 2);
  parallel_for(p.rows(), [&](std::size_t row) {
    const EntityId s{row};
    auto& edge = g.edges[row];
    edge.source = s;
    edge.targets = topk_targets(s, p, g.k);
    const auto stamps = entity_timestamps(s, source);
    const auto rels = entity_relations(s, source);
    for (std::size_t j = 0; j < edge.targets.size(); ++j) {
      const auto t = edge.targets[j];
      const auto base = static_cast<std::uint32_t>((row * g.k + j) * 2);
      g.projections[base] = {ProjectionKind::Time, s, t,
                             mask_time(target.incident(t), target, stamps), base};
      g.projections[base + 1] = {ProjectionKind::Rel, s, t,
                                 mask_rel(target.incident(t), target, rels, bridge), base + 1};
      edge.projections.push_back(base);
      edge.projections.push_back(base + 1);
    }
  });
  return g;
}

}  // namespace tkga
