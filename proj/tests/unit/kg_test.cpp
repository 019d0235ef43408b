#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "test_util.hpp"
#include "tkga/error.hpp"
#include "tkga/kg.hpp"
#include "tkga/rng.hpp"

namespace tkga {
namespace {

using testing::ent;
using testing::kg_from;

TEST(ParseTkg, MixedGranularityInterval) {
  const auto kg = kg_from("Alice\tworksFor\tAcme\t2019-03\t2020\n");
  ASSERT_EQ(kg.num_quadruples(), 1u);
  const auto& q = kg.quadruple(0);
  EXPECT_EQ(q.interval.begin, TimePoint::of_month(2019, 3));
  EXPECT_EQ(q.interval.end, TimePoint::of_year(2020));
  EXPECT_EQ(kg.entity_label(q.head), "Alice");
  EXPECT_EQ(kg.relation_label(q.rel), "worksFor");
  EXPECT_EQ(kg.entity_label(q.tail), "Acme");
  EXPECT_TRUE(q.valid());
}

TEST(ParseTkg, SentinelMeansNoTime) {
  const auto kg = kg_from("Alice\tknows\tBob\t####\t####\n");
  EXPECT_TRUE(kg.quadruple(0).interval.is_none());
  EXPECT_FALSE(kg.quadruple(0).valid());
  EXPECT_EQ(kg.num_valid_quadruples(), 0u);
}

TEST(ParseTkg, BlankAndCommentLinesIgnored) {
  const auto kg = kg_from(
      "# header comment\n"
      "a\tr\tb\t2019\t2019\n"
      "\n"
      "b\tr\tc\t####\t####\n"
      "c\tr\ta\t2020\t####\n");
  EXPECT_EQ(kg.num_quadruples(), 3u);
  EXPECT_EQ(kg.num_entities(), 3u);
  EXPECT_EQ(kg.num_valid_quadruples(), 2u);
  EXPECT_EQ(kg.span(), TimeSpan(2019, 2020));
}

TEST(ParseTkg, MalformedLineReportsLineNumber) {
  try {
    kg_from("a\tr\tb\t2019\t2019\nbroken line\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(kg_from("a\tr\tb\t2019-13\t2019\n"), ParseError);
  EXPECT_THROW(kg_from("a\tr\tb\t2021\t2019\n"), ParseError);
  EXPECT_THROW(kg_from("\tr\tb\t2019\t2019\n"), ParseError);
}

TEST(ParseTkg, CrossGranularityOrderIsChecked) {
  EXPECT_NO_THROW(kg_from("a\tr\tb\t2019-05\t2019\n"));
  EXPECT_THROW(kg_from("a\tr\tb\t2019-05\t2019-04-30\n"), ParseError);
}

TEST(ParseTkg, AdjacencyCoversQuadruples) {
  const auto kg = kg_from("a\tr\tb\t####\t####\nb\tr\tc\t####\t####\nc\ts\tc\t2019\t2019\n");
  EXPECT_EQ(kg.incident(ent(kg, "b")).size(), 2u);
  EXPECT_EQ(kg.incident(ent(kg, "c")).size(), 2u);  // self-loop counted once
  EXPECT_NO_THROW(kg.validate());
}

TEST(ParseSeeds, ResolvesPairsInFileOrder) {
  const auto src = kg_from("Alice\tr\tBob\t####\t####\n");
  const auto tgt = kg_from("<Alice_Q1>\tr\t<Bob_Q2>\t####\t####\n");
  std::istringstream in("Alice\t<Alice_Q1>\nBob\t<Bob_Q2>\n");
  const auto seeds = parse_seeds(in, src, tgt, Split::Train);
  ASSERT_EQ(seeds.pairs.size(), 2u);
  EXPECT_EQ(seeds.pairs[0].source, ent(src, "Alice"));
  EXPECT_EQ(seeds.pairs[0].target, ent(tgt, "<Alice_Q1>"));
  EXPECT_EQ(seeds.pairs[1].source, ent(src, "Bob"));
}

TEST(ParseSeeds, EmptyFileIsEmptyAlignment) {
  const auto src = kg_from("a\tr\tb\t####\t####\n");
  std::istringstream in("");
  EXPECT_TRUE(parse_seeds(in, src, src, Split::Test).pairs.empty());
}

TEST(ParseSeeds, UnknownLabelNamesTheLabel) {
  const auto src = kg_from("a\tr\tb\t####\t####\n");
  std::istringstream in("Ghost\tX\n");
  try {
    parse_seeds(in, src, src, Split::Train);
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_EQ(e.label(), "Ghost");
  }
}

TEST(ParseSeeds, TrainSplitMustBeOneToOne) {
  SeedAlignment seeds;
  seeds.pairs = {{EntityId{0u}, EntityId{0u}, Split::Train},
                 {EntityId{1u}, EntityId{0u}, Split::Test}};
  EXPECT_NO_THROW(validate_train_split(seeds));
  seeds.pairs.push_back({EntityId{2u}, EntityId{0u}, Split::Train});
  EXPECT_THROW(validate_train_split(seeds), IntegrityError);
}

TEST(ParseSeeds, FileLoader) {
  testing::TempDir dir;
  const auto src = kg_from("a\tr\tb\t####\t####\n");
  const auto path = dir.write("seeds.tsv", "a\tb\n");
  EXPECT_EQ(parse_seed_file(path, src, src, Split::Train).pairs.size(), 1u);
  EXPECT_THROW(parse_seed_file(dir.path() / "missing.tsv", src, src, Split::Train), Error);
}

TEST(Signature, YearLevel) {
  const auto kg = kg_from(
      "e\tr\tx\t2019-03\t2019-03\n"
      "e\ts\ty\t2020\t2020\n"
      "z\tr\tw\t2021\t2021\n");
  const TimeSpan span(2019, 2021);
  EXPECT_EQ(temporal_signature(ent(kg, "e"), Granularity::Year, kg, span),
            (std::vector<std::uint8_t>{1, 1, 0}));
}

TEST(Signature, MonthLevelSkipsYearOnlyFacts) {
  const auto kg = kg_from("e\tr\tx\t2019-03\t2019-03\ne\ts\ty\t2020\t2020\n");
  const auto bits = temporal_signature(ent(kg, "e"), Granularity::Month, kg, TimeSpan(2019, 2021));
  ASSERT_EQ(bits.size(), 36u);
  EXPECT_EQ(std::accumulate(bits.begin(), bits.end(), 0), 1);
  EXPECT_EQ(bits[2], 1);
}

TEST(Signature, TimelessEntityIsAllZero) {
  const auto kg = kg_from("e\tr\tx\t####\t####\nz\tr\tw\t2021\t2021\n");
  const auto bits = temporal_signature(ent(kg, "e"), Granularity::Year, kg);
  EXPECT_EQ(std::accumulate(bits.begin(), bits.end(), 0), 0);
}

TEST(Signature, TailRoleCounts) {
  const auto kg = kg_from("x\tr\te\t2019\t2019\n");
  EXPECT_EQ(temporal_signature(ent(kg, "e"), Granularity::Year, kg),
            (std::vector<std::uint8_t>{1}));
}

TEST(EntityContext, ValidFirstThenChronological) {
  const auto kg = kg_from(
      "e\tb\tx\t####\t####\n"
      "e\ta\ty\t2020\t2020\n"
      "e\tc\tz\t2019-05\t2019-06\n");
  const auto ctx = entity_context(ent(kg, "e"), kg, 10);
  ASSERT_EQ(ctx.size(), 3u);
  EXPECT_EQ(kg.relation_label(kg.quadruple(ctx[0]).rel), "c");
  EXPECT_EQ(kg.relation_label(kg.quadruple(ctx[1]).rel), "a");
  EXPECT_FALSE(kg.quadruple(ctx[2]).valid());

  const auto first = entity_context(ent(kg, "e"), kg, 1);
  ASSERT_EQ(first.size(), 1u);
  EXPECT_EQ(first[0], ctx[0]);
}

TEST(EntityContext, RelationLabelBreaksTimeTies) {
  const auto kg = kg_from("e\tzeta\tx\t2019\t2019\ne\talpha\ty\t2019\t2019\n");
  const auto ctx = entity_context(ent(kg, "e"), kg, 10);
  EXPECT_EQ(kg.relation_label(kg.quadruple(ctx[0]).rel), "alpha");
}

TEST(EntityContext, IsolatedEntityIsEmpty) {
  TemporalKG::Builder b;
  b.add("a", "r", "b", {});
  const auto lonely = b.entity("lonely");
  const auto kg = std::move(b).build();
  EXPECT_TRUE(entity_context(lonely, kg, 10).empty());
}

std::string random_time(Rng& rng) {
  switch (rng.index(4)) {
    case 0: return "####";
    case 1: return std::to_string(2000 + rng.index(5));
    case 2: {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%d-%02d", 2000 + static_cast<int>(rng.index(5)),
                    1 + static_cast<int>(rng.index(12)));
      return buf;
    }
    default: {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%d-%02d-%02d", 2000 + static_cast<int>(rng.index(5)),
                    1 + static_cast<int>(rng.index(12)), 1 + static_cast<int>(rng.index(28)));
      return buf;
    }
  }
}

// Random files built from single-endpoint or ordered intervals.
std::string random_file(Rng& rng, std::size_t facts) {
  std::string out;
  for (std::size_t i = 0; i < facts; ++i) {
    const auto t = random_time(rng);
    const bool point = rng.bernoulli(0.5);
    out += "e" + std::to_string(rng.index(8)) + "\tr" + std::to_string(rng.index(3)) + "\te" +
           std::to_string(rng.index(8)) + "\t" + t + "\t" + (point ? t : std::string("####")) +
           "\n";
  }
  return out;
}

TEST(KgProperties, SerializeRoundTripsModuloOrder) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto text = random_file(rng, 1 + rng.index(20));
    const auto kg = kg_from(text);
    std::ostringstream out;
    kg.write(out);
    auto lines = [](const std::string& s) {
      std::multiset<std::string> set;
      std::istringstream in(s);
      for (std::string l; std::getline(in, l);) set.insert(l);
      return set;
    };
    EXPECT_EQ(lines(out.str()), lines(text));
    EXPECT_EQ(kg_from(out.str()).quadruples(), kg.quadruples());
  }
}

TEST(KgProperties, CoarserGranularityNeverLosesBits) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto kg = kg_from(random_file(rng, 1 + rng.index(25)));
    const auto& span = kg.span();
    for (std::size_t e = 0; e < kg.num_entities(); ++e) {
      const auto years = temporal_signature(EntityId{e}, Granularity::Year, kg);
      const auto months = temporal_signature(EntityId{e}, Granularity::Month, kg);
      const auto days = temporal_signature(EntityId{e}, Granularity::Date, kg);
      // A set month bit implies its year bit; a set day bit implies its month bit.
      for (std::size_t m = 0; m < months.size(); ++m) {
        if (months[m]) EXPECT_EQ(years[m / 12], 1);
      }
      for (std::size_t d = 0; d < days.size(); ++d) {
        if (!days[d]) continue;
        // Walk the calendar to find the month index of day d.
        std::size_t month_index = 0;
        for (std::size_t m = 0; m < months.size(); ++m) {
          const int y = span.min_year() + static_cast<int>(m / 12);
          const auto first = decompose_timepoint(TimePoint::of_date(y, static_cast<int>(m % 12) + 1, 1),
                                                 Granularity::Date, span);
          if (*first <= d) month_index = m;
        }
        EXPECT_EQ(months[month_index], 1);
      }
    }
    // Every valid quadruple sets at least one Year bit for its head.
    for (const auto& q : kg.quadruples()) {
      if (!q.valid()) continue;
      const auto bits = temporal_signature(q.head, Granularity::Year, kg);
      EXPECT_GT(std::accumulate(bits.begin(), bits.end(), 0), 0);
    }
  }
}

}  // namespace
}  // namespace tkga
