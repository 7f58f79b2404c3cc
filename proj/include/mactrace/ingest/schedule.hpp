#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "mactrace/core/time.hpp"

namespace mactrace {

struct Schedule {
  int full_runs_per_day = 2;
  int incremental_interval_hours = 3;
  std::vector<std::vector<std::string>> marketplace_groups;
};

// Throws Error when an interval is not positive or a group is empty.
void validate(const Schedule& schedule);

struct ScheduledRun {
  enum class Kind { full, incremental };
  Timestamp at;
  Kind kind;
  std::vector<std::string> marketplaces;
};

/// Runs due on `day`, in time order. Full runs repeat every 24h / full_runs_per_day, with the
/// marketplace groups staggered evenly inside that period. Incremental runs cover every
/// marketplace at each interval starting at midnight.
std::vector<ScheduledRun> runs_for_day(const Schedule& schedule, Day day);

}  // namespace mactrace
