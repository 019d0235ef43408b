#include "tkga/walks.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "tkga/error.hpp"

namespace tkga {

void WalkConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta", "must lie in (0, 1)");
  if (walk_length < 2) throw ConfigError("walk_length", "must be at least 2");
  if (walks_per_entity == 0) throw ConfigError("walks_per_entity", "must be positive");
}

void WalkGraph::add_edge(std::uint32_t a, std::uint32_t b, std::uint32_t rel) {
  if (a == b) return;
  for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
    auto& nbrs = neighbors_[from];
    auto& rels = edge_relations_[from];
    const auto it = std::find(nbrs.begin(), nbrs.end(), to);
    if (it == nbrs.end()) {
      nbrs.push_back(to);
      rels.push_back({rel});
    } else {
      rels[static_cast<std::size_t>(it - nbrs.begin())].push_back(rel);
    }
  }
}

void WalkGraph::finalize() {
  for (std::size_t n = 0; n < neighbors_.size(); ++n) {
    auto& nbrs = neighbors_[n];
    auto& rels = edge_relations_[n];
    std::vector<std::size_t> order(nbrs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return nbrs[x] < nbrs[y]; });
    std::vector<std::uint32_t> sorted_nbrs;
    std::vector<std::vector<std::uint32_t>> sorted_rels;
    for (const auto i : order) {
      sorted_nbrs.push_back(nbrs[i]);
      sorted_rels.push_back(std::move(rels[i]));
    }
    nbrs = std::move(sorted_nbrs);
    rels = std::move(sorted_rels);
  }
}

WalkGraph WalkGraph::from_kg(const TemporalKG& kg) {
  WalkGraph g;
  const auto n = kg.num_entities();
  g.neighbors_.resize(n);
  g.edge_relations_.resize(n);
  g.num_relations_ = kg.num_relations();
  g.node_of_source_.resize(n);
  std::iota(g.node_of_source_.begin(), g.node_of_source_.end(), 0u);
  for (const auto& q : kg.quadruples()) g.add_edge(q.head.value, q.tail.value, q.rel.value);
  g.finalize();
  return g;
}

WalkGraph WalkGraph::joint(const TemporalKG& source, const TemporalKG& target,
                           std::span<const std::pair<EntityId, EntityId>> anchors) {
  const auto ns = source.num_entities();
  const auto nt = target.num_entities();
  std::vector<std::uint32_t> parent(ns + nt);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [s, t] : anchors) {
    const auto a = find(s.value);
    const auto b = find(static_cast<std::uint32_t>(ns + t.index()));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::uint32_t> dense(ns + nt, UINT32_MAX);
  std::vector<std::uint32_t> raw_to_node(ns + nt);
  std::uint32_t next = 0;
  for (std::uint32_t raw = 0; raw < ns + nt; ++raw) {
    const auto root = find(raw);
    if (dense[root] == UINT32_MAX) dense[root] = next++;
    raw_to_node[raw] = dense[root];
  }
  WalkGraph g;
  g.neighbors_.resize(next);
  g.edge_relations_.resize(next);
  g.num_relations_ = source.num_relations() + target.num_relations();
  g.node_of_source_.assign(raw_to_node.begin(), raw_to_node.begin() + static_cast<long>(ns));
  g.node_of_target_.assign(raw_to_node.begin() + static_cast<long>(ns), raw_to_node.end());
  for (const auto& q : source.quadruples()) {
    g.add_edge(g.node_of_source_[q.head.index()], g.node_of_source_[q.tail.index()], q.rel.value);
  }
  const auto rel_offset = static_cast<std::uint32_t>(source.num_relations());
  for (const auto& q : target.quadruples()) {
    g.add_edge(g.node_of_target_[q.head.index()], g.node_of_target_[q.tail.index()],
               rel_offset + q.rel.value);
  }
  g.finalize();
  return g;
}

bool WalkGraph::adjacent(std::uint32_t a, std::uint32_t b) const {
  const auto& nbrs = neighbors_[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::span<const std::uint32_t> WalkGraph::relations_between(std::uint32_t a,
                                                            std::uint32_t b) const {
  const auto& nbrs = neighbors_[a];
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b);
  if (it == nbrs.end() || *it != b) return {};
  return edge_relations_[a][static_cast<std::size_t>(it - nbrs.begin())];
}

std::vector<std::pair<std::uint32_t, double>> transition_distribution(
    std::optional<std::uint32_t> previous, std::uint32_t current, const WalkConfig& cfg,
    const WalkGraph& graph) {
  std::vector<std::pair<std::uint32_t, double>> out;
  double total = 0.0;
  for (const auto cand : graph.neighbors(current)) {
    if (previous && cand == *previous) continue;
    double w = 1.0;
    if (previous) w = graph.adjacent(*previous, cand) ? 1.0 - cfg.beta : cfg.beta;
    out.emplace_back(cand, w);
    total += w;
  }
  for (auto& [_, p] : out) p /= total;
  return out;
}

std::optional<std::uint32_t> sample_step(std::optional<std::uint32_t> previous,
                                         std::uint32_t current, const WalkConfig& cfg,
                                         const WalkGraph& graph, Rng& rng) {
  const auto dist = transition_distribution(previous, current, cfg, graph);
  if (dist.empty()) return std::nullopt;
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [cand, p] : dist) {
    acc += p;
    if (u < acc) return cand;
  }
  return dist.back().first;
}

Walk sample_walk(std::uint32_t start, const WalkConfig& cfg, const WalkGraph& graph, Rng& rng) {
  if (graph.neighbors(start).empty()) {
    throw Error("cannot walk from isolated node " + std::to_string(start));
  }
  Walk walk{Token::entity(start)};
  std::optional<std::uint32_t> previous;
  std::uint32_t current = start;
  for (std::size_t step = 1; step < cfg.walk_length; ++step) {
    const auto next = sample_step(previous, current, cfg, graph, rng);
    if (!next) break;
    const auto rels = graph.relations_between(current, *next);
    walk.push_back(Token::relation(rels[rng.index(rels.size())]));
    walk.push_back(Token::entity(*next));
    previous = current;
    current = *next;
  }
  return walk;
}

Walk sample_walk(EntityId start, const WalkConfig& cfg, const TemporalKG& kg) {
  const auto graph = WalkGraph::from_kg(kg);
  Rng rng(mix_seed(cfg.seed, start.value));
  return sample_walk(start.value, cfg, graph, rng);
}

std::vector<Walk> build_corpus(const WalkGraph& graph, const WalkConfig& cfg) {
  cfg.validate();
  std::vector<Walk> corpus;
  for (std::uint32_t n = 0; n < graph.num_nodes(); ++n) {
    if (graph.neighbors(n).empty()) continue;
    Rng rng(mix_seed(cfg.seed, n));
    for (std::size_t w = 0; w < cfg.walks_per_entity; ++w) {
      corpus.push_back(sample_walk(n, cfg, graph, rng));
    }
  }
  return corpus;
}

std::vector<Walk> build_corpus(const TemporalKG& kg, const WalkConfig& cfg) {
  return build_corpus(WalkGraph::from_kg(kg), cfg);
}

void write_corpus(std::ostream& out, const std::vector<Walk>& corpus) {
  for (const auto& walk : corpus) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << (walk[i].kind == Token::Kind::Entity ? 'E' : 'R') << walk[i].id;
    }
    out << '\n';
  }
}

}  // namespace tkga
