#include "tkga/reasoning.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <set>

#include <spdlog/spdlog.h>

#include "tkga/error.hpp"
#include "tkga/parallel.hpp"

namespace tkga {

namespace {

// Facts of `subset` (sorted quad indices) in entity_context order.
EntityContext subset_context(EntityId e, const TemporalKG& kg, std::span<const std::size_t> subset,
                             std::size_t max_facts) {
  const auto order = entity_context(e, kg, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> kept;
  for (const auto qi : order) {
    if (kept.size() == max_facts) break;
    if (std::binary_search(subset.begin(), subset.end(), qi)) kept.push_back(qi);
  }
  return make_context(e, kg, kept);
}

std::vector<std::size_t> merged(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Runs jobs with bounded concurrency. TransportError skips the job with a
// warning; any other error is rethrown after all workers finish.
template <typename Job>
void run_jobs(std::size_t n, std::size_t max_in_flight, std::vector<bool>& failed, Job&& job) {
  failed.assign(n, false);
  std::vector<char> failed_flags(n, 0);
  std::exception_ptr first;
  std::mutex m;
  bounded_for(n, max_in_flight, [&](std::size_t i) {
    try {
      job(i);
    } catch (const TransportError& e) {
      spdlog::warn("reasoner call skipped: {}", e.what());
      failed_flags[i] = 1;
    } catch (...) {
      const std::lock_guard lock(m);
      if (!first) first = std::current_exception();
    }
  });
  if (first) std::rethrow_exception(first);
  for (std::size_t i = 0; i < n; ++i) failed[i] = failed_flags[i] != 0;
}

}  // namespace

ScaleLayers build_scale_layers(const MultiScaleHypergraph& m, const SimilarityMatrix& p,
                               const TemporalKG& source, const TemporalKG& target,
                               std::span<const EntityId> sources, std::size_t max_facts) {
  if (m.l1 == nullptr || m.bank == nullptr) throw StateError("multi-scale hypergraph is incomplete");
  const auto& g = *m.l1;
  const auto& bank = *m.bank;
  std::vector<EntityId> order(sources.begin(), sources.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  ScaleLayers layers;
  for (std::size_t l = 0; l < 3; ++l) {
    layers[l].scale = l + 1;
    layers[l].edges.resize(order.size());
  }
  parallel_for(order.size(), [&](std::size_t i) {
    const EntityId s = order[i];
    const auto src_ctx = make_context(s, source, max_facts);
    const auto& e1 = g.edges.at(s.index());
    auto full = [&](EntityId t) { return make_context(t, target, max_facts); };

    ScaleHyperedge h1{s, src_ctx, {}};
    for (std::size_t j = 0; j < e1.targets.size(); ++j) {
      const EntityId t = e1.targets[j];
      const auto& pt = g.projection(e1.projections.at(2 * j));
      const auto& pr = g.projection(e1.projections.at(2 * j + 1));
      const auto facts = merged(pt.facts, pr.facts);
      h1.candidates.push_back({subset_context(t, target, facts, max_facts), p(s.index(), t.index())});
    }

    ScaleHyperedge h2{s, src_ctx, {}};
    for (const auto& hit : m.l2.at(s.index()).hits) {
      const auto& entry = bank.entry(hit.entry);
      const EntityId t = entry.target;
      if (entry.kind) {
        const auto& proj = g.projection(entry.id);
        h2.candidates.push_back({subset_context(t, target, proj.facts, max_facts), p(s.index(), t.index())});
      } else {
        h2.candidates.push_back({full(t), p(s.index(), t.index())});
      }
    }

    ScaleHyperedge h3{s, src_ctx, {}};
    for (const EntityId t : m.l3.at(s.index()).targets) {
      h3.candidates.push_back({full(t), p(s.index(), t.index())});
    }

    layers[0].edges[i] = std::move(h1);
    layers[1].edges[i] = std::move(h2);
    layers[2].edges[i] = std::move(h3);
  });
  return layers;
}

ScaleLayer intra_scale_interaction(const ScaleLayer& layer, const ReasoningScope& scope,
                                   Reasoner& reasoner, std::size_t budget,
                                   std::size_t max_in_flight, ReasonerStats* stats) {
  // (edge, candidate) jobs in rank-major order, cut at the budget.
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  std::size_t depth = 0;
  for (const auto& e : layer.edges) depth = std::max(depth, e.candidates.size());
  for (std::size_t r = 0; r < depth && jobs.size() < budget; ++r) {
    for (std::size_t i = 0; i < layer.edges.size() && jobs.size() < budget; ++i) {
      if (r < layer.edges[i].candidates.size()) jobs.emplace_back(i, r);
    }
  }

  std::vector<std::vector<FactEdit>> replies(jobs.size());
  std::vector<bool> failed;
  run_jobs(jobs.size(), max_in_flight, failed, [&](std::size_t j) {
    const auto& e = layer.edges[jobs[j].first];
    replies[j] = reasoner.augment(scope, e.source_context, e.candidates[jobs[j].second]);
  });

  // Apply in source order, then candidate rank.
  std::vector<std::size_t> apply_order(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) apply_order[j] = j;
  std::sort(apply_order.begin(), apply_order.end(),
            [&](std::size_t a, std::size_t b) { return jobs[a] < jobs[b]; });

  ScaleLayer out = layer;
  ReasonerStats local;
  local.calls = jobs.size();
  for (const auto j : apply_order) {
    if (failed[j]) {
      ++local.failures;
      continue;
    }
    auto& e = out.edges[jobs[j].first];
    apply_edits(replies[j], e.source_context, e.candidates[jobs[j].second].context);
    local.edits += replies[j].size();
  }
  if (stats) *stats += local;
  return out;
}

PairSet fusion_select_scale(const ScaleLayer& layer, const ReasoningScope& scope,
                            Reasoner& reasoner, std::size_t budget, std::size_t max_in_flight,
                            ReasonerStats* stats) {
  std::vector<std::size_t> jobs;
  for (std::size_t i = 0; i < layer.edges.size() && jobs.size() < budget; ++i) {
    if (!layer.edges[i].candidates.empty()) jobs.push_back(i);
  }
  std::vector<std::optional<std::size_t>> choice(jobs.size());
  std::vector<bool> failed;
  run_jobs(jobs.size(), max_in_flight, failed, [&](std::size_t j) {
    const auto& e = layer.edges[jobs[j]];
    choice[j] = reasoner.select(scope, e.source_context, e.candidates);
  });

  PairSet out;
  ReasonerStats local;
  local.calls = jobs.size();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (failed[j]) {
      ++local.failures;
      continue;
    }
    if (!choice[j]) continue;
    const auto& e = layer.edges[jobs[j]];
    if (*choice[j] >= e.candidates.size()) throw StateError("reasoner chose a candidate out of range");
    out.insert({e.source, e.candidates[*choice[j]].context.entity});
  }
  if (stats) *stats += local;
  return out;
}

ConflictSet detect_conflicts(const PairSet& phi1, const PairSet& phi2, const PairSet& phi3) {
  const std::array<const PairSet*, 3> phi{&phi1, &phi2, &phi3};
  std::map<EntityId, std::array<std::set<EntityId>, 3>> by_source;
  for (std::size_t l = 0; l < 3; ++l) {
    for (const auto& [s, t] : *phi[l]) by_source[s][l].insert(t);
  }
  ConflictSet c;
  for (const auto& [s, scales] : by_source) {
    for (std::size_t l = 0; l < 3; ++l) {
      for (const EntityId t : scales[l]) {
        bool conflict = false;
        for (std::size_t o = 0; o < 3 && !conflict; ++o) {
          if (o == l) continue;
          const auto& other = scales[o];
          conflict = other.size() > 1 || (other.size() == 1 && *other.begin() != t);
        }
        if (conflict) c.d.insert({s, t});
      }
    }
  }
  for (const auto& [s, t] : c.d) c.groups[s].push_back(t);
  return c;
}

PairSet resolve_conflicts(const ConflictSet& conflicts, const ReasoningScope& scope,
                          Reasoner& reasoner, const SimilarityMatrix& p, std::size_t max_facts,
                          std::size_t max_in_flight, ReasonerStats* stats) {
  std::vector<EntityId> sources;
  for (const auto& [s, _] : conflicts.groups) sources.push_back(s);
  std::vector<std::optional<std::size_t>> choice(sources.size());
  std::vector<bool> failed;
  run_jobs(sources.size(), max_in_flight, failed, [&](std::size_t j) {
    const EntityId s = sources[j];
    const auto src_ctx = make_context(s, *scope.source, max_facts);
    std::vector<CandidateContext> cands;
    for (const EntityId t : conflicts.groups.at(s)) {
      cands.push_back({make_context(t, *scope.target, max_facts), p(s.index(), t.index())});
    }
    choice[j] = reasoner.select(scope, src_ctx, cands);
  });

  PairSet out;
  ReasonerStats local;
  local.calls = sources.size();
  for (std::size_t j = 0; j < sources.size(); ++j) {
    if (failed[j]) {
      ++local.failures;
      continue;
    }
    if (!choice[j]) continue;
    const auto& group = conflicts.groups.at(sources[j]);
    if (*choice[j] >= group.size()) throw StateError("reasoner chose a candidate out of range");
    out.insert({sources[j], group[*choice[j]]});
  }
  if (stats) *stats += local;
  return out;
}

PairSet fuse_final(const PairSet& phi1, const PairSet& phi2, const PairSet& phi3,
                   const PairSet& phi_c) {
  PairSet ab;
  std::set_intersection(phi1.begin(), phi1.end(), phi2.begin(), phi2.end(),
                        std::inserter(ab, ab.end()));
  PairSet out;
  std::set_intersection(ab.begin(), ab.end(), phi3.begin(), phi3.end(),
                        std::inserter(out, out.end()));
  out.insert(phi_c.begin(), phi_c.end());
  return out;
}

}  // namespace tkga
