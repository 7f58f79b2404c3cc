#include "mactrace/geolocate/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mactrace/core/json.hpp"
#include "mactrace/store/journal.hpp"

namespace mactrace {

namespace {

bool valid_coordinates(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 && lon >= -180.0 &&
         lon <= 180.0 && !(lat == kNotFoundSentinel && lon == kNotFoundSentinel);
}

Json observation_json(const GeoObservation& o) {
  return Json{{"bssid", o.bssid},
              {"lat", o.lat},
              {"lon", o.lon},
              {"accuracy_m", o.accuracy_m ? Json(*o.accuracy_m) : Json(nullptr)},
              {"observed_at", timestamp_json(o.observed_at)}};
}

GeoObservation observation_from_json(const Json& j) {
  GeoObservation o;
  o.bssid = j.at("bssid").get<MacAddress>();
  o.lat = j.at("lat").get<double>();
  o.lon = j.at("lon").get<double>();
  if (auto it = j.find("accuracy_m"); it != j.end() && !it->is_null()) o.accuracy_m = it->get<double>();
  o.observed_at = timestamp_from_json(j.at("observed_at"));
  return o;
}

}  // namespace

std::optional<GeoObservation> lookup(const MacAddress& bssid, WpsClient& wps, Timestamp now) {
  const auto reply = wps.query(bssid, now);
  if (is_not_found(reply) || !valid_coordinates(reply.lat, reply.lon)) return std::nullopt;
  std::optional<double> accuracy = reply.accuracy_m;
  if (accuracy && !(*accuracy > 0)) accuracy.reset();
  return GeoObservation{bssid, reply.lat, reply.lon, accuracy, now};
}

TimelineStore::TimelineStore(JournalTable& table) : table_(&table) {
  table.for_each([&](const std::string&, const Json& value) {
    auto o = observation_from_json(value);
    by_bssid_[o.bssid].emplace(utc_day(o.observed_at), o);
  });
}

bool TimelineStore::append(const GeoObservation& observation) {
  if (!valid_coordinates(observation.lat, observation.lon)) return false;
  std::lock_guard lock{mutex_};
  const Day day = utc_day(observation.observed_at);
  auto& days = by_bssid_[observation.bssid];
  if (!days.emplace(day, observation).second) return false;
  if (table_) table_->put(observation.bssid.canonical() + "/" + format_date(day), observation_json(observation));
  return true;
}

bool TimelineStore::has_day(const MacAddress& bssid, Day day) const {
  std::lock_guard lock{mutex_};
  auto it = by_bssid_.find(bssid);
  return it != by_bssid_.end() && it->second.count(day) != 0;
}

std::vector<GeoObservation> TimelineStore::observations(const MacAddress& bssid) const {
  std::lock_guard lock{mutex_};
  std::vector<GeoObservation> out;
  if (auto it = by_bssid_.find(bssid); it != by_bssid_.end()) {
    for (const auto& [day, o] : it->second) out.push_back(o);
  }
  return out;
}

std::vector<MacAddress> TimelineStore::bssids() const {
  std::lock_guard lock{mutex_};
  std::vector<MacAddress> out;
  for (const auto& [bssid, days] : by_bssid_) {
    if (!days.empty()) out.push_back(bssid);
  }
  return out;
}

std::size_t TimelineStore::observation_count() const {
  std::lock_guard lock{mutex_};
  std::size_t n = 0;
  for (const auto& [bssid, days] : by_bssid_) n += days.size();
  return n;
}

std::size_t TimelineStore::import_file(const std::filesystem::path& path) {
  std::size_t accepted = 0;
  read_jsonl(path, [&](const Json& j) {
    if (append(observation_from_json(j))) ++accepted;
  });
  return accepted;
}

void TimelineStore::export_file(const std::filesystem::path& path) const {
  std::ofstream out{path, std::ios::trunc};
  if (!out) throw Error("cannot write " + path.string());
  std::lock_guard lock{mutex_};
  for (const auto& [bssid, days] : by_bssid_) {
    for (const auto& [day, o] : days) write_jsonl_line(out, observation_json(o));
  }
}

PollReport schedule_polling(std::span<const MacAddress> bssids, int days, WpsClient& wps,
                            TimelineStore& store, Day first_day, std::chrono::seconds time_of_day) {
  if (days < 1) throw Error("polling needs at least one day");
  PollReport report;
  for (int d = 0; d < days; ++d) {
    const Day day = first_day + std::chrono::days{d};
    const Timestamp now = start_of(day) + time_of_day;
    for (const auto& bssid : bssids) {
      if (store.has_day(bssid, day)) {
        ++report.skipped;
        continue;
      }
      ++report.queries;
      try {
        if (auto observation = lookup(bssid, wps, now)) {
          store.append(*observation);
          ++report.found;
        } else {
          ++report.not_found;
        }
      } catch (const WpsUnavailable& e) {
        report.failures.push_back({bssid, day, e.what()});
      }
    }
  }
  return report;
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::pre_only: return "pre_only";
    case Category::post_only: return "post_only";
    case Category::both: return "both";
    case Category::never: return "never";
  }
  return "never";
}

Category categorize(const BssidTimeline& timeline) {
  bool before = false;
  bool after = false;
  for (const auto& o : timeline.observations) {
    if (o.observed_at <= timeline.auction_ts) {
      before = true;
    } else {
      after = true;
    }
  }
  if (before && after) return Category::both;
  if (before) return Category::pre_only;
  if (after) return Category::post_only;
  return Category::never;
}

std::size_t count_auction_ties(const BssidTimeline& timeline) {
  return static_cast<std::size_t>(std::count_if(timeline.observations.begin(), timeline.observations.end(),
                                                [&](const GeoObservation& o) { return o.observed_at == timeline.auction_ts; }));
}

std::vector<BssidTimeline> assemble_timelines(const TimelineStore& store, std::span<const AuctionLink> links) {
  std::vector<BssidTimeline> out;
  out.reserve(links.size());
  for (const auto& link : links) {
    BssidTimeline timeline;
    timeline.bssid = link.bssid;
    timeline.listing_id = link.listing_id;
    timeline.auction_ts = link.auction_ts;
    timeline.observations = store.observations(link.bssid);
    timeline.category = categorize(timeline);
    out.push_back(std::move(timeline));
  }
  return out;
}

CategoryCounts count_categories(std::span<const BssidTimeline> timelines) {
  CategoryCounts counts;
  for (const auto& t : timelines) {
    switch (categorize(t)) {
      case Category::pre_only: ++counts.pre_only; break;
      case Category::post_only: ++counts.post_only; break;
      case Category::both: ++counts.both; break;
      case Category::never: ++counts.never; break;
    }
    counts.ties += count_auction_ties(t);
  }
  return counts;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const auto n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  q = std::clamp(q, 0.0, 1.0);
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

TimelineStat timeline_stat(const MacAddress& bssid, std::span<const GeoObservation> observations) {
  std::set<Day> days;
  for (const auto& o : observations) days.insert(utc_day(o.observed_at));
  TimelineStat stat;
  stat.bssid = bssid;
  stat.days_observed = static_cast<int>(days.size());
  if (!days.empty()) stat.span_days = static_cast<int>((*days.rbegin() - *days.begin()).count());
  return stat;
}

TimelineStats timeline_stats(const TimelineStore& store) {
  TimelineStats stats;
  std::vector<double> days;
  std::vector<double> spans;
  for (const auto& bssid : store.bssids()) {
    const auto observations = store.observations(bssid);
    if (observations.empty()) continue;
    auto stat = timeline_stat(bssid, observations);
    days.push_back(stat.days_observed);
    spans.push_back(stat.span_days);
    stats.per_bssid.push_back(stat);
  }
  stats.median_days = median(days);
  stats.median_span = median(spans);
  stats.days_cdf = empirical_cdf(std::move(days));
  stats.span_cdf = empirical_cdf(std::move(spans));
  return stats;
}

}  // namespace mactrace
