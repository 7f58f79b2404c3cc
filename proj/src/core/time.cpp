#include "mactrace/core/time.hpp"

#include <charconv>
#include <cstdio>

namespace mactrace {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  if (pos + len > text.size()) throw TimeParseError("truncated timestamp: " + std::string(text));
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw TimeParseError("bad timestamp field: " + std::string(text));
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw TimeParseError("bad timestamp: " + std::string(text));
  }
}

}  // namespace

std::string format_date(Day day) {
  std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp ts) {
  const Day day = utc_day(ts);
  const auto secs = (ts - Timestamp{day}).count();
  char buf[48];
  std::snprintf(buf, sizeof buf, "T%02lld:%02lld:%02lldZ", static_cast<long long>(secs / 3600),
                static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60));
  return format_date(day) + buf;
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  const int y = parse_field(text, 0, 4);
  expect(text, 4, '-');
  const int mo = parse_field(text, 5, 2);
  expect(text, 7, '-');
  const int d = parse_field(text, 8, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw TimeParseError("invalid date: " + std::string(text));
  Timestamp ts{sys_days{ymd}};
  if (text.size() == 10) return ts;
  expect(text, 10, 'T');
  const int hh = parse_field(text, 11, 2);
  expect(text, 13, ':');
  const int mm = parse_field(text, 14, 2);
  expect(text, 16, ':');
  const int ss = parse_field(text, 17, 2);
  if (hh > 23 || mm > 59 || ss > 60) throw TimeParseError("invalid time: " + std::string(text));
  if (text.size() == 20) {
    expect(text, 19, 'Z');
  } else if (text.size() != 19) {
    throw TimeParseError("trailing characters in timestamp: " + std::string(text));
  }
  return ts + hours{hh} + minutes{mm} + seconds{ss};
}

}  // namespace mactrace
