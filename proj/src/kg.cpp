#include "tkga/kg.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "tkga/error.hpp"

namespace tkga {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// getline variant that also strips a trailing CR.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool skippable(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#';
}

TimePoint time_field(std::string_view text, std::size_t line_no, const char* which) {
  const auto t = parse_time_literal(text);
  if (!t) {
    throw ParseError(line_no, std::string("bad ") + which + " time '" + std::string(text) + "'");
  }
  return *t;
}

}  // namespace

std::uint32_t Vocabulary::intern(std::string_view label) {
  const std::string key(label);
  if (const auto it = index_.find(key); it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.push_back(key);
  index_.emplace(key, id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view label) const {
  if (const auto it = index_.find(std::string(label)); it != index_.end()) return it->second;
  return std::nullopt;
}

void Vocabulary::check_bijection() const {
  if (index_.size() != labels_.size()) {
    throw IntegrityError("label table is not a bijection");
  }
  for (std::uint32_t id = 0; id < labels_.size(); ++id) {
    const auto it = index_.find(labels_[id]);
    if (it == index_.end() || it->second != id) {
      throw IntegrityError("label table is not a bijection at '" + labels_[id] + "'");
    }
  }
}

EntityId TemporalKG::Builder::entity(std::string_view label) {
  return EntityId{entities_.intern(label)};
}

RelationId TemporalKG::Builder::relation(std::string_view label) {
  return RelationId{relations_.intern(label)};
}

void TemporalKG::Builder::add(EntityId head, RelationId rel, EntityId tail,
                              TimeInterval interval) {
  if (head.index() >= entities_.size() || tail.index() >= entities_.size() ||
      rel.index() >= relations_.size()) {
    throw IntegrityError("quadruple references an unknown handle");
  }
  quads_.push_back({head, rel, tail, interval});
}

void TemporalKG::Builder::add(std::string_view head, std::string_view rel, std::string_view tail,
                              TimeInterval interval) {
  const auto h = entity(head);
  const auto r = relation(rel);
  const auto t = entity(tail);
  add(h, r, t, interval);
}

TemporalKG TemporalKG::Builder::build() && {
  TemporalKG kg;
  kg.entities_ = std::move(entities_);
  kg.relations_ = std::move(relations_);
  kg.quads_ = std::move(quads_);
  kg.index();
  kg.validate();
  return kg;
}

void TemporalKG::index() {
  const std::size_t n = entities_.size();
  std::vector<std::size_t> counts(n + 1, 0);
  num_valid_ = 0;
  span_ = TimeSpan{};
  for (const auto& q : quads_) {
    ++counts[q.head.index() + 1];
    if (q.tail != q.head) ++counts[q.tail.index() + 1];
    if (q.valid()) ++num_valid_;
    span_.include(q.interval.begin);
    span_.include(q.interval.end);
  }
  for (std::size_t i = 0; i < n; ++i) counts[i + 1] += counts[i];
  adjacency_offsets_ = counts;
  adjacency_.assign(counts[n], 0);
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < quads_.size(); ++i) {
    const auto& q = quads_[i];
    adjacency_[cursor[q.head.index()]++] = i;
    if (q.tail != q.head) adjacency_[cursor[q.tail.index()]++] = i;
  }
}

void TemporalKG::validate() const {
  entities_.check_bijection();
  relations_.check_bijection();
  std::size_t expected = 0;
  for (const auto& q : quads_) {
    if (q.head.index() >= num_entities() || q.tail.index() >= num_entities() ||
        q.rel.index() >= num_relations()) {
      throw IntegrityError("quadruple references an unknown handle");
    }
    expected += q.head == q.tail ? 1 : 2;
  }
  if (adjacency_.size() != expected) {
    throw IntegrityError("adjacency index does not cover the quadruple list");
  }
  for (std::size_t e = 0; e < num_entities(); ++e) {
    for (const auto qi : incident(EntityId{e})) {
      const auto& q = quads_.at(qi);
      if (q.head.index() != e && q.tail.index() != e) {
        throw IntegrityError("adjacency index lists a non-incident fact");
      }
    }
  }
}

TemporalKG TemporalKG::parse(std::istream& in) {
  Builder builder;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 5) {
      throw ParseError(line_no, "expected 5 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (fields[i].empty()) throw ParseError(line_no, "empty label");
    }
    const TimeInterval interval{time_field(fields[3], line_no, "begin"),
                                time_field(fields[4], line_no, "end")};
    if (const auto c = compare_at_coarsest(interval.begin, interval.end);
        c.has_value() && *c == std::strong_ordering::greater) {
      throw ParseError(line_no, "interval begins after it ends");
    }
    builder.add(fields[0], fields[1], fields[2], interval);
  }
  return std::move(builder).build();
}

TemporalKG TemporalKG::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse(in);
}

void TemporalKG::write(std::ostream& out) const {
  for (const auto& q : quads_) {
    out << entity_label(q.head) << '\t' << relation_label(q.rel) << '\t' << entity_label(q.tail)
        << '\t' << format_time(q.interval.begin) << '\t' << format_time(q.interval.end) << '\n';
  }
}

std::span<const std::size_t> TemporalKG::incident(EntityId e) const {
  const auto i = e.index();
  if (i + 1 >= adjacency_offsets_.size()) return {};
  return {adjacency_.data() + adjacency_offsets_[i], adjacency_offsets_[i + 1] - adjacency_offsets_[i]};
}

std::optional<EntityId> TemporalKG::find_entity(std::string_view label) const {
  if (const auto id = entities_.find(label)) return EntityId{*id};
  return std::nullopt;
}

std::optional<RelationId> TemporalKG::find_relation(std::string_view label) const {
  if (const auto id = relations_.find(label)) return RelationId{*id};
  return std::nullopt;
}

std::vector<SeedPair> SeedAlignment::train() const {
  std::vector<SeedPair> out;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out),
               [](const SeedPair& p) { return p.split == Split::Train; });
  return out;
}

std::vector<SeedPair> SeedAlignment::test() const {
  std::vector<SeedPair> out;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out),
               [](const SeedPair& p) { return p.split == Split::Test; });
  return out;
}

SeedAlignment parse_seeds(std::istream& in, const TemporalKG& source, const TemporalKG& target,
                          Split split) {
  SeedAlignment seeds;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ParseError(line_no, "expected 2 tab-separated labels");
    }
    const auto s = source.find_entity(fields[0]);
    if (!s) throw ResolutionError(std::string(fields[0]));
    const auto t = target.find_entity(fields[1]);
    if (!t) throw ResolutionError(std::string(fields[1]));
    seeds.pairs.push_back({*s, *t, split});
  }
  return seeds;
}

SeedAlignment parse_seed_file(const std::filesystem::path& path, const TemporalKG& source,
                              const TemporalKG& target, Split split) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_seeds(in, source, target, split);
}

void write_seeds(std::ostream& out, const std::vector<SeedPair>& pairs, const TemporalKG& source,
                 const TemporalKG& target) {
  for (const auto& p : pairs) {
    out << source.entity_label(p.source) << '\t' << target.entity_label(p.target) << '\n';
  }
}

void validate_train_split(const SeedAlignment& seeds) {
  std::unordered_map<EntityId, EntityId> by_source;
  std::unordered_map<EntityId, EntityId> by_target;
  for (const auto& p : seeds.pairs) {
    if (p.split != Split::Train) continue;
    if (!by_source.emplace(p.source, p.target).second) {
      throw IntegrityError("train split repeats source handle " + std::to_string(p.source.value));
    }
    if (!by_target.emplace(p.target, p.source).second) {
      throw IntegrityError("train split repeats target handle " + std::to_string(p.target.value));
    }
  }
}

std::vector<std::size_t> active_time_indices(std::span<const Quadruple> facts, Granularity g,
                                             const TimeSpan& span) {
  std::vector<std::size_t> out;
  for (const auto& q : facts) {
    for (const auto* t : {&q.interval.begin, &q.interval.end}) {
      if (const auto i = decompose_timepoint(*t, g, span)) out.push_back(*i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint8_t> temporal_signature(EntityId e, Granularity g, const TemporalKG& kg,
                                             const TimeSpan& span) {
  std::vector<std::uint8_t> bits(span.size(g), 0);
  for (const auto qi : kg.incident(e)) {
    const auto& q = kg.quadruple(qi);
    for (const auto* t : {&q.interval.begin, &q.interval.end}) {
      if (const auto i = decompose_timepoint(*t, g, span)) bits[*i] = 1;
    }
  }
  return bits;
}

std::vector<std::uint8_t> temporal_signature(EntityId e, Granularity g, const TemporalKG& kg) {
  return temporal_signature(e, g, kg, kg.span());
}

std::vector<std::size_t> entity_context(EntityId e, const TemporalKG& kg, std::size_t max_facts) {
  const auto inc = kg.incident(e);
  std::vector<std::size_t> facts(inc.begin(), inc.end());
  auto sort_key = [&](std::size_t qi) -> const TimePoint& {
    const auto& iv = kg.quadruple(qi).interval;
    return iv.begin.known() ? iv.begin : iv.end;
  };
  std::stable_sort(facts.begin(), facts.end(), [&](std::size_t a, std::size_t b) {
    const auto& qa = kg.quadruple(a);
    const auto& qb = kg.quadruple(b);
    if (qa.valid() != qb.valid()) return qa.valid();
    if (const auto c = chrono_compare(sort_key(a), sort_key(b)); c != 0) return c < 0;
    const auto& la = kg.relation_label(qa.rel);
    const auto& lb = kg.relation_label(qb.rel);
    if (la != lb) return la < lb;
    return a < b;
  });
  if (facts.size() > max_facts) facts.resize(max_facts);
  return facts;
}

}  // namespace tkga
