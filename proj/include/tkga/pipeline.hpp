#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tkga/alignment.hpp"
#include "tkga/metrics.hpp"
#include "tkga/names.hpp"
#include "tkga/projection.hpp"
#include "tkga/reasoning.hpp"
#include "tkga/retrieval.hpp"
#include "tkga/skipgram.hpp"
#include "tkga/walks.hpp"

namespace tkga {

struct Dataset {
  TemporalKG source;
  TemporalKG target;
  SeedAlignment seeds;
  RelationMap rel_map = RelationMap::exact_label();
};

struct PipelineConfig {
  std::size_t iterations = 2;
  bool csls_only = false;  // encode and match once; no projection, retrieval or reasoning

  WalkConfig walks;
  SkipgramConfig skipgram;
  TemporalEncoderConfig temporal;
  TrainerConfig trainer;

  std::size_t k_csls = 10;
  std::size_t top_k = 5;  // targets per source in the projection hypergraph
  std::size_t k_r = 5;    // bank entries retrieved per source
  BankConfig bank;
  std::size_t max_facts = 32;

  // Per round. Defaults: 3 select calls and 1 augment call per query source.
  std::optional<std::size_t> select_budget;
  std::optional<std::size_t> augment_budget;
  std::size_t max_in_flight = 4;

  // Replaces this share of first-round fused vectors on each side.
  double noise_ratio = 0.0;
  std::uint64_t noise_seed = 7;

  void validate() const;
};

// Everything produced by encoding and matching against one seed pool.
struct EncodedGraphs {
  GraphViews source;
  GraphViews target;
  TimeSpan span;
  AlignmentModel model;
  TrainingReport training;
  Matrix source_fused;
  Matrix target_fused;
  SimilarityMatrix similarity;
};

// Structural vectors from one skip-gram run on the joint walk graph with
// the anchor pairs merged. Rows are unit length; isolated entities are zero.
std::pair<Matrix, Matrix> structural_views(const TemporalKG& source, const TemporalKG& target,
                                           std::span<const AlignedPair> anchors,
                                           const WalkConfig& walks, const SkipgramConfig& sg);

// Encodes both graphs, trains the fusion on `pool` (continuing from
// `warm_start` when given), applies optional noise to the fused vectors and
// builds the CSLS matrix.
EncodedGraphs encode_graphs(const Dataset& data, const NameProvider& names,
                            std::span<const AlignedPair> pool, const PipelineConfig& cfg,
                            const AlignmentModel* warm_start = nullptr, double noise_ratio = 0.0);

struct RoundRecord {
  std::size_t round = 0;
  std::array<PairSet, 3> phi;
  std::size_t conflicts = 0;  // conflicted sources
  PairSet phi_c;
  PairSet phi_f;
  std::size_t new_pairs = 0;
  ReasonerStats reasoner;
  double final_train_loss = 0.0;
  std::optional<RankReport> report;  // test split under this round's matrix and pins
};

struct PipelineResult {
  SimilarityMatrix similarity;
  Pins pins;
  std::vector<AlignedPair> alignment;  // pseudo-pairs with pins applied
  PairSet pool;
  std::vector<RoundRecord> rounds;
  bool converged = false;
  std::optional<std::string> aborted;  // diagnostic of the round that failed
  std::optional<RankReport> report;
};

// Sources the reasoner works on: every source entity outside the training
// split, ascending.
std::vector<EntityId> query_sources(const Dataset& data);

PipelineResult run_pipeline(const Dataset& data, const NameProvider& names, Reasoner& reasoner,
                            const PipelineConfig& cfg);

}  // namespace tkga
