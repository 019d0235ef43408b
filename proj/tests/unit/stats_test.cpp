#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "test_util.hpp"
#include "tkga/stats.hpp"

namespace tkga {
namespace {

using testing::kg_from;

SeedAlignment seeds_from(const std::string& text, const TemporalKG& s, const TemporalKG& t) {
  std::istringstream in(text);
  return parse_seeds(in, s, t, Split::Train);
}

// Six facts, three per side. By hand:
//   source 2/3 valid, target 1/3 valid -> MTF% = (66.67 + 33.33) / 2 = 50
//   valid counts 2 vs 1 -> delta T.F.% = 100
//   density 2/3 (a, b, c timed) vs 1/2 (x, y timed) -> delta T.D.% = 33.33
//   spans: a=x=[2001,2003], b=y=[2001,2003], c=[2002,2002] vs z none -> 2/3
struct Toy {
  TemporalKG src = kg_from(
      "a\tr1\tb\t2001\t2003\n"
      "a\tr2\tc\t2002-04\t2002-06-01\n"
      "c\tr1\tb\t####\t####\n");
  TemporalKG tgt = kg_from(
      "x\tp1\ty\t2001-02\t2003\n"
      "x\tp2\tz\t####\t####\n"
      "z\tp1\ty\t####\t####\n");
  SeedAlignment seeds = seeds_from("a\tx\nb\ty\nc\tz\n", src, tgt);
};

TEST(DatasetStats, HandComputedToyPair) {
  const Toy toy;
  const auto s = dataset_stats(toy.src, toy.tgt, toy.seeds);
  EXPECT_EQ(s.source.facts, 3u);
  EXPECT_EQ(s.source.valid_facts, 2u);
  EXPECT_EQ(s.target.valid_facts, 1u);
  EXPECT_EQ(s.source.temporal_entities, 3u);
  EXPECT_EQ(s.target.temporal_entities, 2u);
  EXPECT_DOUBLE_EQ(*s.mtf_pct, (200.0 / 3.0 + 100.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(*s.delta_facts_pct, 100.0);
  EXPECT_DOUBLE_EQ(s.source.density, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.target.density, 0.5);
  EXPECT_NEAR(*s.delta_density_pct, 100.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(*s.interval_consistency_pct, 200.0 / 3.0);
  EXPECT_DOUBLE_EQ(*s.source.overlap_pct, 100.0);
  EXPECT_DOUBLE_EQ(*s.target.overlap_pct, 100.0);
}

TEST(DatasetStats, MtfWorkedExample) {
  const auto src = kg_from("a\tr\tb\t2001\t2002\nb\tr\tc\t2003\t2004\nc\tr\td\t####\t####\nd\tr\ta\t####\t####\n");
  const auto tgt = kg_from("a\tr\tb\t2001\t2002\nb\tr\tc\t####\t####\nc\tr\td\t####\t####\nd\tr\ta\t####\t####\n");
  const auto s = dataset_stats(src, tgt, {});
  EXPECT_DOUBLE_EQ(*s.mtf_pct, 37.5);
  EXPECT_DOUBLE_EQ(*s.delta_facts_pct, 100.0);
  EXPECT_FALSE(s.interval_consistency_pct.has_value());
  EXPECT_DOUBLE_EQ(*s.source.overlap_pct, 0.0);
}

TEST(DatasetStats, IdenticalGraphs) {
  Rng rng(4);
  const auto kg = testing::random_kg(rng, 30, 4, 80);
  std::ostringstream text;
  kg.write(text);
  const auto copy = kg_from(text.str());
  std::string pairs;
  for (std::size_t e = 0; e < kg.num_entities(); ++e) {
    pairs += kg.entity_label(EntityId{e}) + "\t" + kg.entity_label(EntityId{e}) + "\n";
  }
  const auto s = dataset_stats(kg, copy, seeds_from(pairs, kg, copy));
  EXPECT_DOUBLE_EQ(*s.delta_facts_pct, 0.0);
  EXPECT_DOUBLE_EQ(*s.delta_density_pct, 0.0);
  EXPECT_DOUBLE_EQ(*s.interval_consistency_pct, 100.0);
}

TEST(DatasetStats, ThirtyVersusTen) {
  std::string a;
  std::string b;
  for (int i = 0; i < 30; ++i) a += "e" + std::to_string(i) + "\tr\tf" + std::to_string(i) + "\t2001\t2002\n";
  for (int i = 0; i < 10; ++i) b += "e" + std::to_string(i) + "\tr\tf" + std::to_string(i) + "\t2001\t2002\n";
  const auto s = dataset_stats(kg_from(a), kg_from(b), {});
  EXPECT_DOUBLE_EQ(*s.delta_facts_pct, 200.0);
}

TEST(DatasetStats, NoValidFactsLeavesDeltasUndefined) {
  const auto src = kg_from("a\tr\tb\t2001\t2002\n");
  const auto tgt = kg_from("a\tr\tb\t####\t####\n");
  const auto s = dataset_stats(src, tgt, {});
  EXPECT_EQ(s.target.density, 0.0);
  EXPECT_FALSE(s.delta_facts_pct.has_value());
  EXPECT_FALSE(s.delta_density_pct.has_value());
  EXPECT_DOUBLE_EQ(*s.mtf_pct, 50.0);
}

TEST(DatasetStats, TimelessPairCountsAsConsistent) {
  const auto src = kg_from("a\tr\tb\t####\t####\n");
  const auto tgt = kg_from("x\tr\ty\t####\t####\n");
  const auto s = dataset_stats(src, tgt, seeds_from("a\tx\n", src, tgt));
  EXPECT_DOUBLE_EQ(*s.interval_consistency_pct, 100.0);
}

TEST(DatasetStats, OverlapComparatorIsLooser) {
  const auto src = kg_from("a\tr\tb\t2001\t2005\n");
  const auto tgt = kg_from("x\tr\ty\t2004\t2009\n");
  const auto seeds = seeds_from("a\tx\n", src, tgt);
  EXPECT_DOUBLE_EQ(*dataset_stats(src, tgt, seeds).interval_consistency_pct, 0.0);
  StatsConfig cfg;
  cfg.interval = IntervalComparator::OverlappingYearSpan;
  EXPECT_DOUBLE_EQ(*dataset_stats(src, tgt, seeds, cfg).interval_consistency_pct, 100.0);
}

TEST(DatasetStats, AllEntitiesDensityBase) {
  const Toy toy;
  StatsConfig cfg;
  cfg.density = DensityBase::AllEntities;
  const auto s = dataset_stats(toy.src, toy.tgt, toy.seeds, cfg);
  EXPECT_DOUBLE_EQ(s.source.density, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.target.density, 1.0 / 3.0);
}

TEST(EntityYearSpan, KnownEndpointsOnly) {
  const auto kg = kg_from("a\tr\tb\t2001\t####\na\tr\tc\t####\t2007-03\nd\tr\te\t####\t####\n");
  EXPECT_EQ(entity_year_span(*kg.find_entity("a"), kg), std::make_pair(2001, 2007));
  EXPECT_EQ(entity_year_span(*kg.find_entity("b"), kg), std::make_pair(2001, 2001));
  EXPECT_FALSE(entity_year_span(*kg.find_entity("d"), kg).has_value());
}

// Renames every label and permutes fact order, which renumbers handles.
std::string relabel(const TemporalKG& kg, Rng& rng, const std::string& prefix) {
  std::ostringstream text;
  kg.write(text);
  std::istringstream in(text.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    std::istringstream f(line);
    std::string h, r, t, b, e;
    std::getline(f, h, '\t');
    std::getline(f, r, '\t');
    std::getline(f, t, '\t');
    std::getline(f, b, '\t');
    std::getline(f, e, '\t');
    lines.push_back(prefix + h + "\t" + prefix + r + "\t" + prefix + t + "\t" + b + "\t" + e);
  }
  rng.shuffle(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

TEST(DatasetStats, InvariantUnderRelabeling) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto src = testing::random_kg(rng, 25, 3, 60, "s");
    const auto tgt = testing::random_kg(rng, 25, 3, 50, "t");
    std::string pairs;
    for (std::size_t e = 0; e < 25; ++e) {
      if (rng.bernoulli(0.5)) continue;
      const auto t = EntityId{rng.index(25)};
      if (src.incident(EntityId{e}).empty() || tgt.incident(t).empty()) continue;
      if (pairs.find("\t" + tgt.entity_label(t) + "\n") != std::string::npos) continue;
      pairs += src.entity_label(EntityId{e}) + "\t" + tgt.entity_label(t) + "\n";
    }
    const auto base = dataset_stats(src, tgt, seeds_from(pairs, src, tgt));

    const auto src2 = kg_from(relabel(src, rng, "x_"));
    const auto tgt2 = kg_from(relabel(tgt, rng, "y_"));
    std::string pairs2;
    std::istringstream in(pairs);
    for (std::string line; std::getline(in, line);) {
      const auto tab = line.find('\t');
      pairs2 += "x_" + line.substr(0, tab) + "\ty_" + line.substr(tab + 1) + "\n";
    }
    const auto moved = dataset_stats(src2, tgt2, seeds_from(pairs2, src2, tgt2));

    // Isolated entities vanish when graphs are rebuilt from facts alone.
    EXPECT_EQ(base.source.facts, moved.source.facts);
    EXPECT_EQ(base.source.valid_facts, moved.source.valid_facts);
    EXPECT_EQ(base.source.temporal_entities, moved.source.temporal_entities);
    EXPECT_EQ(base.target.temporal_entities, moved.target.temporal_entities);
    EXPECT_DOUBLE_EQ(base.source.density, moved.source.density);
    EXPECT_DOUBLE_EQ(base.target.density, moved.target.density);
    EXPECT_EQ(base.mtf_pct, moved.mtf_pct);
    EXPECT_EQ(base.delta_facts_pct, moved.delta_facts_pct);
    EXPECT_EQ(base.delta_density_pct, moved.delta_density_pct);
    EXPECT_EQ(base.interval_consistency_pct, moved.interval_consistency_pct);
  }
}

TEST(DatasetStats, PercentagesInRange) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto src = testing::random_kg(rng, 20, 3, 40, "s");
    const auto tgt = testing::random_kg(rng, 20, 3, 40, "t");
    const auto s = dataset_stats(src, tgt, {});
    ASSERT_TRUE(s.mtf_pct.has_value());
    EXPECT_GE(*s.mtf_pct, 0.0);
    EXPECT_LE(*s.mtf_pct, 100.0);
    if (s.delta_facts_pct) EXPECT_GE(*s.delta_facts_pct, 0.0);
    if (s.delta_density_pct) EXPECT_GE(*s.delta_density_pct, 0.0);
  }
}

}  // namespace
}  // namespace tkga
