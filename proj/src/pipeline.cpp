#include "tkga/pipeline.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "tkga/error.hpp"

namespace tkga {

namespace {

Matrix name_view(const TemporalKG& kg, const NameProvider& names) {
  std::vector<std::string> labels;
  labels.reserve(kg.num_entities());
  for (std::size_t e = 0; e < kg.num_entities(); ++e) labels.push_back(kg.entity_label(EntityId{e}));
  return row_normalized(embed_names(labels, names));
}

// Splits `total` calls over the three scales, remainder to the finer ones first.
std::array<std::size_t, 3> split_budget(std::size_t total) {
  std::array<std::size_t, 3> b{total / 3, total / 3, total / 3};
  for (std::size_t i = 0; i < total % 3; ++i) ++b[i];
  return b;
}

}  // namespace

void PipelineConfig::validate() const {
  if (iterations == 0) throw ConfigError("iterations", "must be at least 1");
  if (k_csls == 0) throw ConfigError("k_csls", "must be positive");
  if (top_k == 0) throw ConfigError("top_k", "must be positive");
  if (k_r == 0) throw ConfigError("k_r", "must be positive");
  if (max_facts == 0) throw ConfigError("max_facts", "must be positive");
  if (max_in_flight == 0) throw ConfigError("max_in_flight", "must be positive");
  if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) throw ConfigError("noise_ratio", "must lie in [0, 1]");
  walks.validate();
  skipgram.validate();
  trainer.validate();
}

std::pair<Matrix, Matrix> structural_views(const TemporalKG& source, const TemporalKG& target,
                                           std::span<const AlignedPair> anchors,
                                           const WalkConfig& walks, const SkipgramConfig& sg) {
  std::vector<std::pair<EntityId, EntityId>> links;
  links.reserve(anchors.size());
  for (const auto& a : anchors) links.emplace_back(a.source, a.target);
  const auto graph = WalkGraph::joint(source, target, links);
  const auto corpus = build_corpus(graph, walks);
  const auto emb = train_structural_embeddings(corpus, sg, graph.num_nodes(), graph.num_relations());

  auto gather = [&](std::size_t n, auto node_of) {
    Matrix m(n, sg.dimension);
    for (std::size_t e = 0; e < n; ++e) {
      const auto node = node_of(EntityId{e});
      if (node >= emb.entity_present.size() || !emb.entity_present[node]) continue;
      const auto row = emb.entities.row(node);
      std::copy(row.begin(), row.end(), m.row(e).begin());
    }
    return row_normalized(m);
  };
  return {gather(source.num_entities(), [&](EntityId e) { return graph.source_node(e); }),
          gather(target.num_entities(), [&](EntityId e) { return graph.target_node(e); })};
}

EncodedGraphs encode_graphs(const Dataset& data, const NameProvider& names,
                            std::span<const AlignedPair> pool, const PipelineConfig& cfg,
                            const AlignmentModel* warm_start, double noise_ratio) {
  EncodedGraphs out;
  out.span = data.source.span();
  out.span.merge(data.target.span());

  auto [ss, ts] = structural_views(data.source, data.target, pool, cfg.walks, cfg.skipgram);
  out.source = {name_view(data.source, names), std::move(ss), EntityTimeIndex::build(data.source, out.span)};
  out.target = {name_view(data.target, names), std::move(ts), EntityTimeIndex::build(data.target, out.span)};

  if (warm_start) {
    out.model = *warm_start;
  } else {
    out.model = AlignmentModel::init(names.dimension(), cfg.skipgram.dimension, cfg.temporal, out.span);
  }
  out.training = train_alignment(out.model, pool, out.source, out.target, cfg.trainer);

  out.source_fused = out.model.embed_all(out.source);
  out.target_fused = out.model.embed_all(out.target);
  if (noise_ratio > 0.0) {
    inject_noise(out.source_fused, noise_ratio, cfg.noise_seed);
    inject_noise(out.target_fused, noise_ratio, mix_seed(cfg.noise_seed, 1));
  }
  out.similarity = csls_similarity(out.source_fused, out.target_fused, cfg.k_csls, cfg.top_k);
  return out;
}

std::vector<EntityId> query_sources(const Dataset& data) {
  std::set<EntityId> train;
  for (const auto& p : data.seeds.train()) train.insert(p.source);
  std::vector<EntityId> out;
  for (std::size_t e = 0; e < data.source.num_entities(); ++e) {
    if (!train.count(EntityId{e})) out.push_back(EntityId{e});
  }
  return out;
}

PipelineResult run_pipeline(const Dataset& data, const NameProvider& names, Reasoner& reasoner,
                            const PipelineConfig& cfg) {
  cfg.validate();
  validate_train_split(data.seeds);
  const auto train = data.seeds.train();
  const auto test = data.seeds.test();

  PipelineResult result;
  std::set<EntityId> gt_sources;
  std::set<EntityId> gt_targets;
  for (const auto& p : train) {
    result.pool.insert({p.source, p.target});
    gt_sources.insert(p.source);
    gt_targets.insert(p.target);
  }

  if (cfg.csls_only) {
    const std::vector<AlignedPair> pool(result.pool.begin(), result.pool.end());
    auto enc = encode_graphs(data, names, pool, cfg, nullptr, cfg.noise_ratio);
    RoundRecord rec;
    rec.round = 1;
    rec.final_train_loss = enc.training.epoch_loss.empty() ? 0.0 : enc.training.epoch_loss.back();
    if (!test.empty()) rec.report = evaluate(enc.similarity, test);
    result.report = rec.report;
    result.rounds.push_back(std::move(rec));
    result.similarity = std::move(enc.similarity);
    result.alignment = pseudo_pairs(result.similarity);
    return result;
  }

  const RelationBridge bridge(data.rel_map, data.source, data.target);
  const ReasoningScope scope{&data.source, &data.target, &bridge};
  const auto queries = query_sources(data);
  spdlog::info("{} query sources ({} training pairs held out of reasoning)", queries.size(), train.size());
  const auto select_split = split_budget(cfg.select_budget.value_or(3 * queries.size()) );
  const auto augment_split = split_budget(cfg.augment_budget.value_or(queries.size()));

  std::optional<AlignmentModel> model;
  for (std::size_t round = 1; round <= cfg.iterations; ++round) {
    RoundRecord rec;
    rec.round = round;
    try {
      const std::vector<AlignedPair> pool(result.pool.begin(), result.pool.end());
      auto enc = encode_graphs(data, names, pool, cfg, model ? &*model : nullptr,
                               round == 1 ? cfg.noise_ratio : 0.0);
      rec.final_train_loss = enc.training.epoch_loss.empty() ? 0.0 : enc.training.epoch_loss.back();
      const auto& p = enc.similarity;

      const auto g = build_projection_hypergraph(p, cfg.top_k, data.source, data.target, bridge);
      const auto bank = MemoryBank::build(g, enc.model, enc.target, data.target, enc.span, cfg.bank);
      const auto ms = build_multiscale(g, bank, enc.source_fused, cfg.k_r);
      const auto layers = build_scale_layers(ms, p, data.source, data.target, queries, cfg.max_facts);

      for (std::size_t l = 0; l < 3; ++l) {
        const auto edited = intra_scale_interaction(layers[l], scope, reasoner, augment_split[l],
                                                    cfg.max_in_flight, &rec.reasoner);
        rec.phi[l] = fusion_select_scale(edited, scope, reasoner, select_split[l], cfg.max_in_flight,
                                         &rec.reasoner);
      }
      const auto conflicts = detect_conflicts(rec.phi[0], rec.phi[1], rec.phi[2]);
      rec.conflicts = conflicts.groups.size();
      rec.phi_c = resolve_conflicts(conflicts, scope, reasoner, p, cfg.max_facts, cfg.max_in_flight,
                                    &rec.reasoner);
      rec.phi_f = fuse_final(rec.phi[0], rec.phi[1], rec.phi[2], rec.phi_c);

      auto pins = result.pins;
      auto next_pool = result.pool;
      for (const auto& pr : rec.phi_f) {
        if (gt_sources.count(pr.source) || gt_targets.count(pr.target)) continue;
        pins[pr.source] = pr.target;
        if (next_pool.insert(pr).second) ++rec.new_pairs;
      }
      if (!test.empty()) rec.report = evaluate(p, test, pins);
      spdlog::info("round {}: |phi| = {}/{}/{}, conflicts {}, |phi_f| = {}, new pairs {}{}", round,
                   rec.phi[0].size(), rec.phi[1].size(), rec.phi[2].size(), rec.conflicts,
                   rec.phi_f.size(), rec.new_pairs,
                   rec.report ? fmt::format(", Hits@1 {:.4f}", rec.report->hits1) : std::string{});
      // Commit the round.
      result.pins = std::move(pins);
      result.pool = std::move(next_pool);
      model = enc.model;
      result.similarity = std::move(enc.similarity);
      result.rounds.push_back(std::move(rec));
    } catch (const Error& e) {
      spdlog::error("round {} aborted: {}", round, e.what());
      result.aborted = "round " + std::to_string(round) + ": " + e.what();
      break;
    }
    if (result.rounds.back().new_pairs == 0) {
      result.converged = true;
      break;
    }
  }

  if (result.similarity.rows() > 0) {
    result.alignment = pseudo_pairs(result.similarity);
    for (auto& pr : result.alignment) {
      if (const auto it = result.pins.find(pr.source); it != result.pins.end()) pr.target = it->second;
    }
    if (!result.rounds.empty()) result.report = result.rounds.back().report;
  }
  return result;
}

}  // namespace tkga
