#include "tkga/reasoner.hpp"

#include <algorithm>
#include <climits>
#include <set>

namespace tkga {

EntityContext make_context(EntityId e, const TemporalKG& kg, std::span<const std::size_t> facts) {
  EntityContext c{e, {}};
  c.facts.reserve(facts.size());
  for (const auto qi : facts) {
    const auto& q = kg.quadruple(qi);
    const bool outgoing = q.head == e;
    c.facts.push_back({q.rel, outgoing ? q.tail : q.head, outgoing, q.interval});
  }
  return c;
}

EntityContext make_context(EntityId e, const TemporalKG& kg, std::size_t max_facts) {
  const auto order = entity_context(e, kg, max_facts);
  return make_context(e, kg, order);
}

void apply_edits(std::span<const FactEdit> edits, EntityContext& source, EntityContext& candidate) {
  for (const auto& edit : edits) {
    auto& facts = edit.side == Side::Source ? source.facts : candidate.facts;
    if (edit.op == FactEdit::Op::Add) {
      facts.push_back(edit.fact);
    } else if (const auto it = std::find(facts.begin(), facts.end(), edit.fact); it != facts.end()) {
      facts.erase(it);
    }
  }
}

namespace {

void add_years(const TimeInterval& iv, std::vector<int>& out) {
  if (iv.begin.known()) out.push_back(iv.begin.year);
  if (iv.end.known()) out.push_back(iv.end.year);
}

std::vector<int> years_of(const ContextFact& f) {
  std::vector<int> y;
  add_years(f.interval, y);
  return y;
}

}  // namespace

std::size_t matched_pairs(const ReasoningScope& scope, const EntityContext& source,
                          const EntityContext& candidate) {
  // (target relation, year) present on the candidate
  std::set<std::pair<std::uint32_t, int>> cand;
  for (const auto& f : candidate.facts) {
    for (const int y : years_of(f)) cand.emplace(f.rel.value, y);
  }
  std::set<std::pair<std::uint32_t, int>> src;
  for (const auto& f : source.facts) {
    for (const int y : years_of(f)) src.emplace(f.rel.value, y);
  }
  std::size_t n = 0;
  for (const auto& [rs, y] : src) {
    const bool hit = std::any_of(cand.begin(), cand.end(), [&](const auto& c) {
      return c.second == y && scope.bridge->matches(RelationId{rs}, RelationId{c.first});
    });
    if (hit) ++n;
  }
  return n;
}

std::optional<std::size_t> MockReasoner::select(const ReasoningScope& scope,
                                                const EntityContext& source,
                                                std::span<const CandidateContext> candidates) {
  std::optional<std::size_t> best;
  std::size_t best_matches = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto m = matched_pairs(scope, source, candidates[i].context);
    if (m == 0) continue;
    if (!best || m > best_matches ||
        (m == best_matches && candidates[i].score > candidates[*best].score)) {
      best = i;
      best_matches = m;
    }
  }
  return best;
}

std::vector<FactEdit> MockReasoner::augment(const ReasoningScope& scope,
                                            const EntityContext& source,
                                            const CandidateContext& candidate) {
  std::vector<FactEdit> edits;
  const auto& cand = candidate.context.facts;

  for (const auto& sf : source.facts) {
    if (sf.interval.is_none()) continue;
    for (const auto& cf : cand) {
      if (!cf.interval.is_none() || !scope.bridge->matches(sf.rel, cf.rel)) continue;
      ContextFact filled = cf;
      filled.interval = sf.interval;
      const FactEdit add{FactEdit::Op::Add, Side::Candidate, filled};
      if (std::find(cand.begin(), cand.end(), filled) == cand.end() &&
          std::find(edits.begin(), edits.end(), add) == edits.end()) {
        edits.push_back(add);
      }
    }
  }

  int lo = INT_MAX;
  int hi = INT_MIN;
  for (const auto& sf : source.facts) {
    for (const int y : years_of(sf)) {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  if (lo <= hi) {
    for (const auto& cf : cand) {
      const auto ys = years_of(cf);
      if (ys.empty()) continue;
      const bool shared = std::any_of(source.facts.begin(), source.facts.end(), [&](const auto& sf) {
        return scope.bridge->matches(sf.rel, cf.rel);
      });
      if (!shared) continue;
      if (std::all_of(ys.begin(), ys.end(), [&](int y) { return y < lo || y > hi; })) {
        edits.push_back({FactEdit::Op::Remove, Side::Candidate, cf});
      }
    }
  }
  return edits;
}

}  // namespace tkga
