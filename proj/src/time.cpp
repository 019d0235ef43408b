#include "tkga/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace tkga {

namespace {

bool parse_digits(std::string_view s, std::size_t width, int& out) {
  if (s.size() != width) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::chrono::sys_days to_days(int y, int m, int d) {
  using namespace std::chrono;
  return sys_days{year{y} / month{static_cast<unsigned>(m)} / day{static_cast<unsigned>(d)}};
}

}  // namespace

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::Year: return "year";
    case Granularity::Month: return "month";
    case Granularity::Date: return "date";
    case Granularity::Unknown: break;
  }
  return "unknown";
}

TimePoint TimePoint::truncated(Granularity g) const {
  switch (g) {
    case Granularity::Year: return of_year(year);
    case Granularity::Month: return of_month(year, *month);
    case Granularity::Date: return *this;
    case Granularity::Unknown: break;
  }
  return unknown();
}

std::optional<TimePoint> parse_time_literal(std::string_view text) {
  if (text == "####") return TimePoint::unknown();
  int y = 0;
  int m = 0;
  int d = 0;
  if (text.size() == 4) {
    if (!parse_digits(text, 4, y)) return std::nullopt;
    return TimePoint::of_year(y);
  }
  if (text.size() == 7 && text[4] == '-') {
    if (!parse_digits(text.substr(0, 4), 4, y) || !parse_digits(text.substr(5, 2), 2, m)) {
      return std::nullopt;
    }
    if (m < 1 || m > 12) return std::nullopt;
    return TimePoint::of_month(y, m);
  }
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    if (!parse_digits(text.substr(0, 4), 4, y) || !parse_digits(text.substr(5, 2), 2, m) ||
        !parse_digits(text.substr(8, 2), 2, d)) {
      return std::nullopt;
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return TimePoint::of_date(y, m, d);
  }
  return std::nullopt;
}

std::string format_time(const TimePoint& t) {
  char buf[16];
  switch (t.granularity) {
    case Granularity::Year: std::snprintf(buf, sizeof buf, "%04d", t.year); break;
    case Granularity::Month: std::snprintf(buf, sizeof buf, "%04d-%02d", t.year, *t.month); break;
    case Granularity::Date:
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", t.year, *t.month, *t.day);
      break;
    case Granularity::Unknown: return "####";
  }
  return buf;
}

std::strong_ordering chrono_compare(const TimePoint& a, const TimePoint& b) {
  if (a.known() != b.known()) {
    return a.known() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (!a.known()) return std::strong_ordering::equal;
  if (auto c = a.year <=> b.year; c != 0) return c;
  if (a.month.has_value() != b.month.has_value()) {
    return a.month.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (!a.month) return std::strong_ordering::equal;
  if (auto c = *a.month <=> *b.month; c != 0) return c;
  if (a.day.has_value() != b.day.has_value()) {
    return a.day.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (!a.day) return std::strong_ordering::equal;
  return *a.day <=> *b.day;
}

std::optional<std::strong_ordering> compare_at_coarsest(const TimePoint& a, const TimePoint& b) {
  if (!a.known() || !b.known()) return std::nullopt;
  const auto g = static_cast<Granularity>(
      std::min(static_cast<int>(a.granularity), static_cast<int>(b.granularity)));
  return chrono_compare(a.truncated(g), b.truncated(g));
}

bool matches_at_coarsest(const TimePoint& a, const TimePoint& b) {
  const auto c = compare_at_coarsest(a, b);
  return c.has_value() && *c == std::strong_ordering::equal;
}

TimeSpan::TimeSpan(int min_year, int max_year)
    : min_year_(min_year), max_year_(max_year), empty_(max_year < min_year) {}

std::size_t TimeSpan::size(Granularity g) const {
  if (empty_) return 0;
  const auto years = static_cast<std::size_t>(max_year_ - min_year_ + 1);
  switch (g) {
    case Granularity::Year: return years;
    case Granularity::Month: return years * 12;
    case Granularity::Date:
      return static_cast<std::size_t>(
          (to_days(max_year_ + 1, 1, 1) - to_days(min_year_, 1, 1)).count());
    case Granularity::Unknown: break;
  }
  return 0;
}

void TimeSpan::include(int year) {
  if (empty_) {
    min_year_ = max_year_ = year;
    empty_ = false;
    return;
  }
  min_year_ = std::min(min_year_, year);
  max_year_ = std::max(max_year_, year);
}

void TimeSpan::include(const TimePoint& t) {
  if (t.known()) include(t.year);
}

void TimeSpan::merge(const TimeSpan& other) {
  if (other.empty_) return;
  include(other.min_year_);
  include(other.max_year_);
}

bool TimeSpan::contains(const TimePoint& t) const {
  return t.known() && !empty_ && t.year >= min_year_ && t.year <= max_year_;
}

std::optional<std::size_t> decompose_timepoint(const TimePoint& t, Granularity g,
                                               const TimeSpan& span) {
  if (!t.resolves(g) || !span.contains(t)) return std::nullopt;
  const int years = t.year - span.min_year();
  switch (g) {
    case Granularity::Year: return static_cast<std::size_t>(years);
    case Granularity::Month: return static_cast<std::size_t>(years * 12 + (*t.month - 1));
    case Granularity::Date:
      return static_cast<std::size_t>(
          (to_days(t.year, *t.month, *t.day) - to_days(span.min_year(), 1, 1)).count());
    case Granularity::Unknown: break;
  }
  return std::nullopt;
}

}  // namespace tkga
