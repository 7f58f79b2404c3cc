#include "mactrace/ingest/schedule.hpp"

#include <algorithm>

namespace mactrace {

void validate(const Schedule& schedule) {
  if (schedule.full_runs_per_day <= 0) throw Error("full_runs_per_day must be positive");
  if (schedule.incremental_interval_hours <= 0) throw Error("incremental_interval_hours must be positive");
  for (const auto& group : schedule.marketplace_groups) {
    if (group.empty()) throw Error("empty marketplace group in schedule");
  }
}

std::vector<ScheduledRun> runs_for_day(const Schedule& schedule, Day day) {
  using namespace std::chrono;
  validate(schedule);
  std::vector<ScheduledRun> runs;
  const Timestamp midnight = start_of(day);
  const seconds period = seconds{hours{24}} / schedule.full_runs_per_day;
  const auto groups = schedule.marketplace_groups.size();

  for (int k = 0; k < schedule.full_runs_per_day; ++k) {
    for (std::size_t g = 0; g < groups; ++g) {
      const auto stagger = period * static_cast<long>(g) / static_cast<long>(groups);
      runs.push_back({midnight + period * k + stagger, ScheduledRun::Kind::full,
                      schedule.marketplace_groups[g]});
    }
  }

  std::vector<std::string> everyone;
  for (const auto& group : schedule.marketplace_groups) everyone.insert(everyone.end(), group.begin(), group.end());
  for (hours h{0}; h < hours{24}; h += hours{schedule.incremental_interval_hours}) {
    runs.push_back({midnight + h, ScheduledRun::Kind::incremental, everyone});
  }

  std::stable_sort(runs.begin(), runs.end(),
                   [](const ScheduledRun& a, const ScheduledRun& b) { return a.at < b.at; });
  return runs;
}

}  // namespace mactrace
