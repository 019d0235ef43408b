#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tkga {

// Resolution of a time point. Ordered coarse to fine; Unknown sorts last.
enum class Granularity : std::uint8_t { Year = 0, Month = 1, Date = 2, Unknown = 3 };

inline constexpr std::array<Granularity, 3> kGranularities{Granularity::Year, Granularity::Month,
                                                           Granularity::Date};

std::string_view to_string(Granularity g) noexcept;

// A calendar point known at year, month, or day resolution, or not at all.
// Fields finer than the granularity are absent.
struct TimePoint {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;
  Granularity granularity = Granularity::Unknown;

  static TimePoint unknown() { return {}; }
  static TimePoint of_year(int y) { return {y, std::nullopt, std::nullopt, Granularity::Year}; }
  static TimePoint of_month(int y, int m) { return {y, m, std::nullopt, Granularity::Month}; }
  static TimePoint of_date(int y, int m, int d) { return {y, m, d, Granularity::Date}; }

  bool known() const noexcept { return granularity != Granularity::Unknown; }

  // True when this point carries at least the resolution of g.
  bool resolves(Granularity g) const noexcept {
    return known() && g != Granularity::Unknown &&
           static_cast<int>(granularity) >= static_cast<int>(g);
  }

  // The same point with fields finer than g dropped. Requires resolves(g).
  TimePoint truncated(Granularity g) const;

  bool operator==(const TimePoint&) const = default;
};

// Parses YYYY, YYYY-MM, YYYY-MM-DD or the unknown sentinel ####.
// Returns nullopt on anything else, including impossible calendar dates.
std::optional<TimePoint> parse_time_literal(std::string_view text);

// Inverse of parse_time_literal.
std::string format_time(const TimePoint& t);

// Chronological order. Unknown sorts after every known point; a coarser point
// sorts before finer points it contains (2019 < 2019-01 < 2019-01-01).
std::strong_ordering chrono_compare(const TimePoint& a, const TimePoint& b);

// Equality at the coarser of the two granularities: (2019,3) matches (2019).
// Unknown never matches.
bool matches_at_coarsest(const TimePoint& a, const TimePoint& b);

// Compares a and b at the coarser of their granularities; nullopt if either
// is unknown.
std::optional<std::strong_ordering> compare_at_coarsest(const TimePoint& a, const TimePoint& b);

struct TimeInterval {
  TimePoint begin;
  TimePoint end;

  // Both endpoints unknown: the fact has no time.
  bool is_none() const noexcept { return !begin.known() && !end.known(); }

  bool operator==(const TimeInterval&) const = default;
};

// Ordered set of time points T_g at one granularity, spanning whole years
// [min_year, max_year]. Indices are 0-based: Jan of min_year is month 0 and
// Jan 1 of min_year is day 0.
class TimeSpan {
 public:
  TimeSpan() = default;
  TimeSpan(int min_year, int max_year);

  bool empty() const noexcept { return empty_; }
  int min_year() const noexcept { return min_year_; }
  int max_year() const noexcept { return max_year_; }

  // |T_g|.
  std::size_t size(Granularity g) const;

  // Widens the span to cover year y.
  void include(int year);
  void include(const TimePoint& t);
  void merge(const TimeSpan& other);

  bool contains(const TimePoint& t) const;

  bool operator==(const TimeSpan&) const = default;

 private:
  int min_year_ = 0;
  int max_year_ = -1;
  bool empty_ = true;
};

// Ordinal of t within T_g, or nullopt when t is unknown, coarser than g, or
// outside the span. Finer points map to the index of their truncation.
std::optional<std::size_t> decompose_timepoint(const TimePoint& t, Granularity g,
                                               const TimeSpan& span);

}  // namespace tkga
