#include "tkga/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>
#include <set>

#include "tkga/error.hpp"
#include "tkga/parallel.hpp"
#include "tkga/rng.hpp"

namespace tkga {

std::vector<double> embed_projection(const Projection& p, const AlignmentModel& model,
                                     const GraphViews& target_views, const TemporalKG& target,
                                     const TimeSpan& span) {
  if (!model.trained) throw StateError("projection embedding needs a trained alignment model");
  std::vector<Quadruple> facts;
  facts.reserve(p.facts.size());
  for (const auto qi : p.facts) facts.push_back(target.quadruple(qi));
  std::array<std::vector<std::size_t>, 3> active;
  for (const auto g : kGranularities) {
    active[static_cast<std::size_t>(g)] = active_time_indices(facts, g, span);
  }
  return model.embed(target_views.names.row(p.target.index()),
                     target_views.structural.row(p.target.index()),
                     {active[0], active[1], active[2]});
}

MemoryBank MemoryBank::build(const ProjectionHypergraph& g, const AlignmentModel& model,
                             const GraphViews& target_views, const TemporalKG& target,
                             const TimeSpan& span, const BankConfig& cfg) {
  if (!model.trained) throw StateError("memory bank needs a trained alignment model");
  std::vector<std::uint32_t> ids;
  for (const auto& p : g.projections) {
    if (!p.empty()) ids.push_back(p.id);
  }
  std::vector<BankEntry> entries(ids.size());
  parallel_for(ids.size(), [&](std::size_t i) {
    const auto& p = g.projection(ids[i]);
    entries[i] = {p.id, p.target, p.kind, embed_projection(p, model, target_views, target, span)};
  });
  if (cfg.include_raw_targets) {
    const auto base = static_cast<std::uint32_t>(g.projections.size());
    for (std::size_t t = 0; t < target.num_entities(); ++t) {
      entries.push_back({base + static_cast<std::uint32_t>(t), EntityId{t}, std::nullopt,
                         model.embed(target_views, EntityId{t})});
    }
  }
  return from_entries(std::move(entries), cfg);
}

MemoryBank MemoryBank::from_entries(std::vector<BankEntry> entries, const BankConfig& cfg) {
  MemoryBank bank;
  bank.cfg_ = cfg;
  std::sort(entries.begin(), entries.end(),
            [](const BankEntry& a, const BankEntry& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].id == entries[i - 1].id) throw IntegrityError("duplicate memory bank id");
  }
  if (!entries.empty()) bank.dim_ = entries.front().vector.size();
  for (auto& e : entries) {
    if (e.vector.size() != bank.dim_) throw LayoutError("memory bank vectors differ in width");
    normalize_in_place(e.vector);
  }
  bank.entries_ = std::move(entries);
  if (cfg.mode == IndexMode::Approx) bank.build_index();
  return bank;
}

namespace {

std::size_t nearest(std::span<const double> v, const std::vector<std::vector<double>>& centroids) {
  std::size_t best = 0;
  double best_score = -2.0;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double s = cosine(v, centroids[c]);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

}  // namespace

// Spherical k-means over the unit vectors.
void MemoryBank::build_index() {
  const std::size_t n = entries_.size();
  if (n == 0) return;
  std::size_t nlist = cfg_.nlist;
  if (nlist == 0) nlist = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  nlist = std::clamp<std::size_t>(nlist, 1, n);

  Rng rng(cfg_.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  centroids_.clear();
  for (std::size_t c = 0; c < nlist; ++c) centroids_.push_back(entries_[order[c]].vector);

  std::vector<std::size_t> assign(n, 0);
  for (int iter = 0; iter < 10; ++iter) {
    for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(entries_[i].vector, centroids_);
    std::vector<std::vector<double>> sums(nlist, std::vector<double>(dim_, 0.0));
    std::vector<std::size_t> counts(nlist, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t d = 0; d < dim_; ++d) sums[assign[i]][d] += entries_[i].vector[d];
    }
    for (std::size_t c = 0; c < nlist; ++c) {
      if (counts[c] == 0 || norm(sums[c]) == 0.0) continue;
      normalize_in_place(sums[c]);
      centroids_[c] = std::move(sums[c]);
    }
  }
  lists_.assign(nlist, {});
  for (std::size_t i = 0; i < n; ++i) {
    lists_[nearest(entries_[i].vector, centroids_)].push_back(static_cast<std::uint32_t>(i));
  }
}

std::vector<Retrieved> MemoryBank::retrieve(std::span<const double> query, std::size_t k) const {
  if (!entries_.empty() && query.size() != dim_) throw LayoutError("query width mismatch");
  k = std::min(k, entries_.size());
  std::vector<Retrieved> hits;
  if (k == 0) return hits;
  const double qn = norm(query);
  auto score = [&](std::uint32_t i) {
    return qn == 0.0 ? 0.0 : dot(query, entries_[i].vector) / qn;
  };
  if (cfg_.mode == IndexMode::Exact) {
    hits.reserve(entries_.size());
    for (std::uint32_t i = 0; i < entries_.size(); ++i) hits.push_back({i, score(i)});
  } else {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t c = 0; c < centroids_.size(); ++c) ranked.emplace_back(-cosine(query, centroids_[c]), c);
    std::sort(ranked.begin(), ranked.end());
    std::size_t probed = 0;
    for (const auto& [_, c] : ranked) {
      if (probed >= cfg_.nprobe && hits.size() >= k) break;
      for (const auto i : lists_[c]) hits.push_back({i, score(i)});
      ++probed;
    }
  }
  auto better = [](const Retrieved& a, const Retrieved& b) {
    return a.score > b.score || (a.score == b.score && a.entry < b.entry);
  };
  std::partial_sort(hits.begin(), hits.begin() + static_cast<long>(k), hits.end(), better);
  hits.resize(k);
  return hits;
}

std::uint64_t MemoryBank::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : entries_) {
    mix(&e.id, sizeof e.id);
    mix(&e.target.value, sizeof e.target.value);
    const std::uint8_t kind = e.kind ? static_cast<std::uint8_t>(*e.kind) : 2;
    mix(&kind, 1);
    mix(e.vector.data(), e.vector.size() * sizeof(double));
  }
  return h;
}

void MemoryBank::dump(std::ostream& out, const TemporalKG& target) const {
  auto put32 = [&out](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  for (const auto& e : entries_) {
    put32(e.id);
    const auto& label = target.entity_label(e.target);
    put32(static_cast<std::uint32_t>(label.size()));
    out.write(label.data(), static_cast<std::streamsize>(label.size()));
    const char kind = e.kind ? static_cast<char>(*e.kind) : 2;
    out.put(kind);
    put32(static_cast<std::uint32_t>(e.vector.size()));
    for (const double x : e.vector) {
      const auto f = static_cast<float>(x);
      out.write(reinterpret_cast<const char*>(&f), 4);
    }
  }
}

std::vector<std::uint32_t> MultiScaleHypergraph::l2_nodes() const {
  std::set<std::uint32_t> s;
  for (const auto& e : l2) {
    for (const auto& h : e.hits) s.insert(h.entry);
  }
  return {s.begin(), s.end()};
}

std::vector<EntityId> MultiScaleHypergraph::l3_nodes() const {
  std::set<EntityId> s;
  for (const auto& e : l3) s.insert(e.targets.begin(), e.targets.end());
  return {s.begin(), s.end()};
}

MultiScaleHypergraph build_multiscale(const ProjectionHypergraph& g, const MemoryBank& bank,
                                      const Matrix& queries, std::size_t k_r) {
  MultiScaleHypergraph m;
  m.l1 = &g;
  m.bank = &bank;
  m.l2.resize(g.edges.size());
  m.l3.resize(g.edges.size());
  parallel_for(g.edges.size(), [&](std::size_t i) {
    const auto s = g.edges[i].source;
    m.l2[i] = {s, bank.retrieve(queries.row(s.index()), k_r)};
    m.l3[i].source = s;
    for (const auto& h : m.l2[i].hits) {
      const auto t = bank.entry(h.entry).target;
      if (std::find(m.l3[i].targets.begin(), m.l3[i].targets.end(), t) == m.l3[i].targets.end()) {
        m.l3[i].targets.push_back(t);
      }
    }
  });
  return m;
}

}  // namespace tkga
