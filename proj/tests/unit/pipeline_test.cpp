#include <gtest/gtest.h>

#include <atomic>

#include "tkga/error.hpp"
#include "tkga/pipeline.hpp"
#include "tkga/reasoner.hpp"
#include "tkga/synth.hpp"

namespace tkga {
namespace {

Dataset small_dataset(const char* preset, std::size_t entities = 40, std::uint64_t seed = 3) {
  auto cfg = synth_preset(preset);
  cfg.entities = entities;
  cfg.seed = seed;
  auto d = synth_generate(cfg);
  return {std::move(d.source), std::move(d.target), std::move(d.seeds), std::move(d.rel_map)};
}

PipelineConfig fast_config() {
  PipelineConfig c;
  c.walks.walks_per_entity = 4;
  c.walks.walk_length = 10;
  c.skipgram.dimension = 16;
  c.skipgram.epochs = 2;
  c.temporal.output_dim = 8;
  c.temporal.k = 4;
  c.trainer.epochs = 5;
  c.max_in_flight = 2;
  return c;
}

// Forwards to the mock until `fail_after` calls, then throws.
class FailingReasoner final : public Reasoner {
 public:
  FailingReasoner(std::size_t fail_after, bool transport) : fail_after_(fail_after), transport_(transport) {}

  std::optional<std::size_t> select(const ReasoningScope& scope, const EntityContext& source,
                                    std::span<const CandidateContext> candidates) override {
    tick();
    return mock_.select(scope, source, candidates);
  }
  std::vector<FactEdit> augment(const ReasoningScope& scope, const EntityContext& source,
                                const CandidateContext& candidate) override {
    tick();
    return mock_.augment(scope, source, candidate);
  }

 private:
  void tick() {
    if (calls_.fetch_add(1) < fail_after_) return;
    if (transport_) throw TransportError("endpoint down");
    throw Error("reasoner broke");
  }

  MockReasoner mock_;
  std::atomic<std::size_t> calls_{0};
  std::size_t fail_after_;
  bool transport_;
};

TEST(QuerySources, ExcludeTrainingSources) {
  const auto d = small_dataset("easy");
  const auto q = query_sources(d);
  const auto train = d.seeds.train();
  EXPECT_EQ(q.size(), d.source.num_entities() - train.size());
  for (const auto& p : train) EXPECT_FALSE(std::binary_search(q.begin(), q.end(), p.source));
  EXPECT_TRUE(std::is_sorted(q.begin(), q.end()));
}

TEST(RunPipeline, SingleIteration) {
  const auto d = small_dataset("easy");
  HashingNameProvider names(32);
  MockReasoner mock;
  auto cfg = fast_config();
  cfg.iterations = 1;
  const auto r = run_pipeline(d, names, mock, cfg);
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_FALSE(r.aborted.has_value());
  ASSERT_TRUE(r.report.has_value());
  EXPECT_EQ(r.report->ranks.size(), d.seeds.test().size());
  EXPECT_EQ(r.alignment.size(), d.source.num_entities());
  const auto q = query_sources(d).size();
  EXPECT_LE(r.rounds[0].reasoner.calls, 3 * q + q + q);
}

TEST(RunPipeline, StopsWhenNoNewPairs) {
  const auto d = small_dataset("easy");
  HashingNameProvider names(32);
  MockReasoner mock;
  auto cfg = fast_config();
  cfg.iterations = 6;
  const auto r = run_pipeline(d, names, mock, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.rounds.size(), 6u);
  EXPECT_EQ(r.rounds.back().new_pairs, 0u);
}

TEST(RunPipeline, DeterministicUnderFixedSeeds) {
  const auto d = small_dataset("wild");
  HashingNameProvider names(32);
  MockReasoner a;
  MockReasoner b;
  const auto cfg = fast_config();
  const auto ra = run_pipeline(d, names, a, cfg);
  const auto rb = run_pipeline(d, names, b, cfg);
  EXPECT_EQ(ra.alignment, rb.alignment);
  EXPECT_EQ(ra.pins, rb.pins);
  ASSERT_EQ(ra.rounds.size(), rb.rounds.size());
  for (std::size_t i = 0; i < ra.rounds.size(); ++i) {
    EXPECT_EQ(ra.rounds[i].phi_f, rb.rounds[i].phi_f);
    EXPECT_EQ(ra.rounds[i].report->ranks, rb.rounds[i].report->ranks);
  }
  EXPECT_TRUE(std::ranges::equal(ra.similarity.scores().data(), rb.similarity.scores().data()));
}

TEST(RunPipeline, GroundTruthPairsStayInPoolAndUnpinned) {
  const auto d = small_dataset("wild");
  HashingNameProvider names(32);
  MockReasoner mock;
  const auto r = run_pipeline(d, names, mock, fast_config());
  for (const auto& p : d.seeds.train()) {
    EXPECT_TRUE(r.pool.count({p.source, p.target}));
    EXPECT_FALSE(r.pins.count(p.source));
    for (const auto& [s, t] : r.pins) EXPECT_NE(t, p.target);
  }
  for (const auto& pr : r.alignment) {
    if (const auto it = r.pins.find(pr.source); it != r.pins.end()) EXPECT_EQ(pr.target, it->second);
  }
}

TEST(RunPipeline, AbortKeepsPreviousRound) {
  const auto d = small_dataset("wild");
  HashingNameProvider names(32);
  MockReasoner mock;
  auto cfg = fast_config();
  cfg.iterations = 1;
  const auto one = run_pipeline(d, names, mock, cfg);
  const auto calls = one.rounds[0].reasoner.calls;

  cfg.iterations = 3;
  FailingReasoner failing(calls + 5, false);
  const auto r = run_pipeline(d, names, failing, cfg);
  ASSERT_TRUE(r.aborted.has_value());
  EXPECT_NE(r.aborted->find("round 2"), std::string::npos);
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_EQ(r.pins, one.pins);
  EXPECT_EQ(r.pool, one.pool);
  EXPECT_EQ(r.alignment, one.alignment);
  EXPECT_EQ(r.report->ranks, one.report->ranks);
}

TEST(RunPipeline, TransportFailuresAreSkipped) {
  const auto d = small_dataset("easy");
  HashingNameProvider names(32);
  FailingReasoner down(0, true);
  auto cfg = fast_config();
  cfg.iterations = 1;
  const auto r = run_pipeline(d, names, down, cfg);
  EXPECT_FALSE(r.aborted.has_value());
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_EQ(r.rounds[0].reasoner.calls, r.rounds[0].reasoner.failures);
  EXPECT_GT(r.rounds[0].reasoner.failures, 0u);
  EXPECT_TRUE(r.rounds[0].phi_f.empty());
  EXPECT_TRUE(r.pins.empty());
}

TEST(RunPipeline, CslsOnlyMakesNoCalls) {
  const auto d = small_dataset("easy");
  HashingNameProvider names(32);
  FailingReasoner never(0, false);
  auto cfg = fast_config();
  cfg.csls_only = true;
  const auto r = run_pipeline(d, names, never, cfg);
  EXPECT_FALSE(r.aborted.has_value());
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_EQ(r.rounds[0].reasoner.calls, 0u);
  EXPECT_TRUE(r.pins.empty());
}

TEST(RunPipeline, ZeroBudgetsLeaveOnlyConflictResolution) {
  const auto d = small_dataset("easy");
  HashingNameProvider names(32);
  MockReasoner mock;
  auto cfg = fast_config();
  cfg.iterations = 1;
  cfg.select_budget = 0;
  cfg.augment_budget = 0;
  const auto r = run_pipeline(d, names, mock, cfg);
  EXPECT_EQ(r.rounds[0].reasoner.calls, 0u);
  EXPECT_TRUE(r.rounds[0].phi_f.empty());
}

TEST(PipelineConfig, RejectsBadValues) {
  auto cfg = fast_config();
  cfg.iterations = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = fast_config();
  cfg.top_k = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = fast_config();
  cfg.noise_ratio = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace tkga
