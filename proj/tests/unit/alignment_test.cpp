#include <gtest/gtest.h>

#include <cmath>

#include "tkga/alignment.hpp"
#include "tkga/error.hpp"
#include "tkga/names.hpp"
#include "test_util.hpp"

namespace tkga {
namespace {

using testing::kg_from;

const char* kSource =
    "a\tr1\tb\t2001-03\t2004\n"
    "a\tr2\tc\t1999-12-05\t2000-01-02\n"
    "b\tr1\tc\t2010\t2012-06\n"
    "c\tr3\td\t####\t####\n"
    "d\tr2\ta\t2005\t2005\n";

const char* kTarget =
    "a'\tr1\tb'\t2001\t2004-02\n"
    "a'\tr2\tc'\t1999-12\t2000-01-02\n"
    "b'\tr1\tc'\t2010-04-01\t2012\n"
    "c'\tr3\td'\t2003\t####\n"
    "d'\tr2\ta'\t2005-07\t2006\n";

GraphViews views_of(const TemporalKG& kg, const TimeSpan& span, std::size_t d, Rng& rng) {
  GraphViews v;
  std::vector<std::string> labels;
  for (std::size_t e = 0; e < kg.num_entities(); ++e) labels.push_back(kg.entity_label(EntityId{e}));
  v.names = embed_names(labels, HashingNameProvider(6));
  v.structural = Matrix(kg.num_entities(), d);
  for (double& x : v.structural.data()) x = rng.normal(0.0, 1.0);
  v.time = EntityTimeIndex::build(kg, span);
  return v;
}

struct Fixture {
  TemporalKG src = kg_from(kSource);
  TemporalKG tgt = kg_from(kTarget);
  TimeSpan span;
  GraphViews sv;
  GraphViews tv;
  AlignmentModel model;

  Fixture() {
    span = src.span();
    span.merge(tgt.span());
    Rng rng(11);
    sv = views_of(src, span, 4, rng);
    tv = views_of(tgt, span, 4, rng);
    model = AlignmentModel::init(6, 4, {.k = 3, .output_dim = 3, .seed = 5}, span);
    model.params.gates = {0.8, 1.3, 0.7, 1.1, 0.9};
  }
};

TEST(Hinge, InactiveWhenMarginSatisfied) { EXPECT_DOUBLE_EQ(hinge_loss(0.0, 2.0, 1.0), 0.0); }

TEST(Hinge, EqualDistancesGiveMargin) {
  EXPECT_DOUBLE_EQ(hinge_loss(0.4, 0.4, 0.7), 0.7);
  EXPECT_DOUBLE_EQ(hinge_loss(1.3, 1.3, 1.0), 1.0);
}

TEST(Alignment, EmbedMatchesFusedViews) {
  Fixture f;
  const auto e = EntityId{0u};
  const auto v = f.model.embed(f.sv, e);
  EXPECT_EQ(v.size(), f.model.layout.total());
  const auto year = encode_entity_time(f.sv.time.of(e, Granularity::Year),
                                       f.model.params.encoder.at(Granularity::Year));
  const auto block = view_block(v, f.model.layout, View::Year);
  for (std::size_t i = 0; i < year.size(); ++i) EXPECT_DOUBLE_EQ(block[i], 1.3 * year[i]);
}

TEST(Alignment, FlattenAssignRoundTrip) {
  Fixture f;
  auto flat = f.model.params.flatten();
  EXPECT_EQ(flat.size(), f.model.params.size());
  for (double& x : flat) x += 0.25;
  auto copy = f.model.params;
  copy.assign(flat);
  EXPECT_EQ(copy.flatten(), flat);
}

// The analytic gradient must agree with central differences.
TEST(Alignment, GradientMatchesFiniteDifferences) {
  Fixture f;
  std::vector<Triple> triples;
  for (std::uint32_t s = 0; s < 4; ++s) {
    for (std::uint32_t n = 0; n < 4; ++n) {
      if (n != s) triples.push_back({EntityId{s}, EntityId{s}, EntityId{n}});
    }
  }
  // A margin above 2 keeps every hinge active.
  const double margin = 2.5;
  std::vector<double> grad;
  triplet_loss(f.model, f.sv, f.tv, triples, margin, &grad);
  const auto theta = f.model.params.flatten();
  ASSERT_EQ(grad.size(), theta.size());

  std::vector<std::size_t> probe{0, 1, 2, 3, 4};
  Rng rng(99);
  while (probe.size() < 15) probe.push_back(5 + rng.index(theta.size() - 5));

  const double h = 1e-6;
  for (const auto i : probe) {
    auto plus = theta;
    auto minus = theta;
    plus[i] += h;
    minus[i] -= h;
    AlignmentModel mp = f.model;
    AlignmentModel mm = f.model;
    mp.params.assign(plus);
    mm.params.assign(minus);
    const double numeric = (triplet_loss(mp, f.sv, f.tv, triples, margin) -
                            triplet_loss(mm, f.sv, f.tv, triples, margin)) /
                           (2 * h);
    const double denom = std::max(std::abs(numeric) + std::abs(grad[i]), 1e-8);
    EXPECT_LT(std::abs(numeric - grad[i]) / denom, 1e-4)
        << "param " << i << " analytic " << grad[i] << " numeric " << numeric;
  }
}

TEST(Alignment, LossIsNonNegativeAndZeroOnlyWhenMarginsHold) {
  Fixture f;
  const std::vector<Triple> triples{{EntityId{0u}, EntityId{0u}, EntityId{1u}}};
  EXPECT_GE(triplet_loss(f.model, f.sv, f.tv, triples, 0.1), 0.0);
  // Identical source and negative embeddings can never satisfy a margin.
  const std::vector<Triple> degenerate{{EntityId{0u}, EntityId{1u}, EntityId{1u}}};
  EXPECT_NEAR(triplet_loss(f.model, f.sv, f.tv, degenerate, 0.3), 0.3, 1e-12);
}

TEST(Alignment, TrainingReducesLossAndIsDeterministic) {
  Fixture f;
  std::vector<AlignedPair> seeds;
  for (std::uint32_t i = 0; i < 4; ++i) seeds.push_back({EntityId{i}, EntityId{i}});
  TrainerConfig cfg;
  cfg.epochs = 40;
  cfg.learning_rate = 0.05;
  cfg.negatives = 3;
  auto m1 = f.model;
  auto m2 = f.model;
  const auto r1 = train_alignment(m1, seeds, f.sv, f.tv, cfg);
  const auto r2 = train_alignment(m2, seeds, f.sv, f.tv, cfg);
  EXPECT_TRUE(m1.trained);
  EXPECT_EQ(r1.epoch_loss, r2.epoch_loss);
  EXPECT_EQ(m1.params.flatten(), m2.params.flatten());
  EXPECT_LT(r1.epoch_loss.back(), r1.epoch_loss.front());
}

TEST(Alignment, EmptySeedsIsTrainingError) {
  Fixture f;
  EXPECT_THROW(train_alignment(f.model, {}, f.sv, f.tv, {}), TrainingError);
}

TEST(Alignment, NonPositiveMarginIsConfigError) {
  TrainerConfig cfg;
  cfg.margin = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace tkga
