#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "mactrace/core/error.hpp"

namespace mactrace {

using Timestamp = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

class TimeParseError : public Error {
 public:
  using Error::Error;
};

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp ts);
std::string format_date(Day day);

// Accepts "YYYY-MM-DDTHH:MM:SSZ", "YYYY-MM-DDTHH:MM:SS" and "YYYY-MM-DD".
Timestamp parse_timestamp(std::string_view text);

inline Day utc_day(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

inline Timestamp start_of(Day day) { return Timestamp{day}; }

inline Timestamp from_unix(long long seconds) { return Timestamp{std::chrono::seconds{seconds}}; }
inline long long to_unix(Timestamp ts) { return ts.time_since_epoch().count(); }

}  // namespace mactrace
