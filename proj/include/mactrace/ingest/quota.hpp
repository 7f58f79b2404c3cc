#pragma once

#include <cstdint>
#include <mutex>

#include "mactrace/core/time.hpp"

namespace mactrace {

inline constexpr std::int64_t kDefaultDailyQuota = 5'000;

struct QuotaState {
  std::int64_t calls_today = 0;
  std::int64_t daily_limit = kDefaultDailyQuota;
  Day window_start{};
};

/// Daily API call budget. The window resets when the UTC date of `now` changes.
/// All members are atomic with respect to each other.
class Quota {
 public:
  explicit Quota(std::int64_t daily_limit = kDefaultDailyQuota, Day window_start = {});
  explicit Quota(QuotaState state);

  // Consumes one unit if available.
  bool try_consume(Timestamp now);
  std::int64_t remaining(Timestamp now);
  QuotaState state() const;

 private:
  void roll(Timestamp now);

  QuotaState state_;
  mutable std::mutex mutex_;
};

}  // namespace mactrace
