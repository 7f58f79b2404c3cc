#include "mactrace/ingest/quota.hpp"

namespace mactrace {

Quota::Quota(std::int64_t daily_limit, Day window_start) {
  state_.daily_limit = daily_limit;
  state_.window_start = window_start;
}

Quota::Quota(QuotaState state) : state_(state) {}

void Quota::roll(Timestamp now) {
  const Day today = utc_day(now);
  if (today != state_.window_start) {
    state_.window_start = today;
    state_.calls_today = 0;
  }
}

bool Quota::try_consume(Timestamp now) {
  std::lock_guard lock{mutex_};
  roll(now);
  if (state_.calls_today >= state_.daily_limit) return false;
  ++state_.calls_today;
  return true;
}

std::int64_t Quota::remaining(Timestamp now) {
  std::lock_guard lock{mutex_};
  roll(now);
  return state_.daily_limit - state_.calls_today;
}

QuotaState Quota::state() const {
  std::lock_guard lock{mutex_};
  return state_;
}

}  // namespace mactrace
