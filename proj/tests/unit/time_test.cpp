#include <gtest/gtest.h>

#include "tkga/time.hpp"

namespace tkga {
namespace {

TEST(TimeLiteral, ParsesEachGranularity) {
  EXPECT_EQ(*parse_time_literal("2019"), TimePoint::of_year(2019));
  EXPECT_EQ(*parse_time_literal("2019-03"), TimePoint::of_month(2019, 3));
  EXPECT_EQ(*parse_time_literal("2019-03-07"), TimePoint::of_date(2019, 3, 7));
  EXPECT_EQ(*parse_time_literal("####"), TimePoint::unknown());
}

TEST(TimeLiteral, RejectsMalformed) {
  for (const char* bad : {"", "19", "2019-13", "2019-3", "2019-02-30", "20x9", "2019/03",
                          "###", "2019-03-07T00"}) {
    EXPECT_FALSE(parse_time_literal(bad).has_value()) << bad;
  }
}

TEST(TimeLiteral, FormatIsInverse) {
  for (const char* lit : {"0995", "2019", "2019-03", "2020-02-29", "####"}) {
    EXPECT_EQ(format_time(*parse_time_literal(lit)), lit);
  }
}

TEST(TimePoint, CoarsestMatch) {
  EXPECT_TRUE(matches_at_coarsest(TimePoint::of_month(2019, 3), TimePoint::of_year(2019)));
  EXPECT_TRUE(matches_at_coarsest(TimePoint::of_date(2019, 3, 4), TimePoint::of_month(2019, 3)));
  EXPECT_FALSE(matches_at_coarsest(TimePoint::of_date(2019, 3, 4), TimePoint::of_date(2019, 3, 5)));
  EXPECT_FALSE(matches_at_coarsest(TimePoint::of_year(2019), TimePoint::unknown()));
}

TEST(TimePoint, ChronologicalOrder) {
  EXPECT_TRUE(chrono_compare(TimePoint::of_year(2019), TimePoint::of_month(2019, 1)) < 0);
  EXPECT_TRUE(chrono_compare(TimePoint::of_month(2019, 12), TimePoint::of_year(2020)) < 0);
  EXPECT_TRUE(chrono_compare(TimePoint::of_year(2030), TimePoint::unknown()) < 0);
  EXPECT_TRUE(chrono_compare(TimePoint::unknown(), TimePoint::unknown()) == 0);
}

TEST(Decompose, YearIndex) {
  const TimeSpan span(2019, 2021);
  EXPECT_EQ(decompose_timepoint(TimePoint::of_year(2020), Granularity::Year, span), 1u);
  EXPECT_EQ(span.size(Granularity::Year), 3u);
}

TEST(Decompose, CoarserThanRequestedIsAbsent) {
  const TimeSpan span(2019, 2021);
  EXPECT_FALSE(decompose_timepoint(TimePoint::of_year(2019), Granularity::Month, span));
  EXPECT_FALSE(decompose_timepoint(TimePoint::unknown(), Granularity::Year, span));
}

TEST(Decompose, MonthIndexIsZeroBased) {
  const TimeSpan span(2019, 2021);
  EXPECT_EQ(decompose_timepoint(TimePoint::of_month(2019, 3), Granularity::Month, span), 2u);
  EXPECT_EQ(span.size(Granularity::Month), 36u);
}

TEST(Decompose, DateCountsCalendarDays) {
  const TimeSpan span(2019, 2020);
  EXPECT_EQ(span.size(Granularity::Date), 365u + 366u);
  EXPECT_EQ(decompose_timepoint(TimePoint::of_date(2019, 1, 1), Granularity::Date, span), 0u);
  EXPECT_EQ(decompose_timepoint(TimePoint::of_date(2020, 3, 1), Granularity::Date, span),
            365u + 31u + 29u);
  // Finer points decompose through truncation.
  EXPECT_EQ(decompose_timepoint(TimePoint::of_date(2020, 3, 1), Granularity::Year, span), 1u);
}

TEST(Decompose, OutsideSpanIsAbsent) {
  const TimeSpan span(2019, 2021);
  EXPECT_FALSE(decompose_timepoint(TimePoint::of_year(2018), Granularity::Year, span));
  EXPECT_FALSE(decompose_timepoint(TimePoint::of_year(2019), Granularity::Year, TimeSpan{}));
}

}  // namespace
}  // namespace tkga
