#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mactrace/geolocate/wps.hpp"

namespace mactrace {

class JournalTable;

struct GeoObservation {
  MacAddress bssid;
  double lat = 0;
  double lon = 0;
  std::optional<double> accuracy_m;
  Timestamp observed_at{};

  bool operator==(const GeoObservation&) const = default;
};

// nullopt when the service reports the not-found sentinel or an out-of-range coordinate.
// WpsUnavailable propagates.
std::optional<GeoObservation> lookup(const MacAddress& bssid, WpsClient& wps, Timestamp now);

/// Observations per BSSID, at most one per UTC day (the first one wins), kept in time order.
/// Appends are serialized; a backing table, when given, receives every accepted observation
/// under the key "<bssid>/<YYYY-MM-DD>".
class TimelineStore {
 public:
  TimelineStore() = default;
  explicit TimelineStore(JournalTable& table);

  // False when the BSSID already has an observation that day, or the point is the sentinel.
  bool append(const GeoObservation& observation);
  bool has_day(const MacAddress& bssid, Day day) const;

  std::vector<GeoObservation> observations(const MacAddress& bssid) const;
  std::vector<MacAddress> bssids() const;
  std::size_t observation_count() const;

  // Line-delimited {bssid, lat, lon, accuracy_m, observed_at}. Returns records accepted.
  std::size_t import_file(const std::filesystem::path& path);
  void export_file(const std::filesystem::path& path) const;

 private:
  std::map<MacAddress, std::map<Day, GeoObservation>> by_bssid_;
  JournalTable* table_ = nullptr;
  mutable std::mutex mutex_;
};

struct PollFailure {
  MacAddress bssid;
  Day day;
  std::string message;
};

struct PollReport {
  std::size_t queries = 0;
  std::size_t found = 0;
  std::size_t not_found = 0;
  std::size_t skipped = 0;  // already observed that day
  std::vector<PollFailure> failures;
};

/// Queries every BSSID once per day for `days` days starting at `first_day`; each query is
/// stamped at `first_day + d` plus `time_of_day`. A failed query is simply retried on the
/// next day's cycle.
PollReport schedule_polling(std::span<const MacAddress> bssids, int days, WpsClient& wps,
                            TimelineStore& store, Day first_day,
                            std::chrono::seconds time_of_day = std::chrono::hours{12});

enum class Category { pre_only, post_only, both, never };

std::string_view to_string(Category category);

struct BssidTimeline {
  MacAddress bssid;
  std::string listing_id;
  std::vector<GeoObservation> observations;  // time-ordered
  Timestamp auction_ts{};
  Category category = Category::never;
};

// An observation exactly at auction time counts as before the auction.
Category categorize(const BssidTimeline& timeline);
std::size_t count_auction_ties(const BssidTimeline& timeline);

// Builds one categorized timeline per (bssid, listing) link.
struct AuctionLink {
  MacAddress bssid;
  std::string listing_id;
  Timestamp auction_ts{};
};
std::vector<BssidTimeline> assemble_timelines(const TimelineStore& store, std::span<const AuctionLink> links);

struct CategoryCounts {
  std::size_t pre_only = 0;
  std::size_t post_only = 0;
  std::size_t both = 0;
  std::size_t never = 0;
  std::size_t ties = 0;  // observations exactly at auction time, counted as "before"
  std::size_t total() const { return pre_only + post_only + both + never; }
};
CategoryCounts count_categories(std::span<const BssidTimeline> timelines);

struct CdfPoint {
  double value = 0;
  double fraction = 0;
};
// Empirical CDF over sorted values: one point per distinct value, fraction = share <= value.
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);
// Middle value, or the mean of the two middle values for an even count; 0 when empty.
double median(std::vector<double> values);
// Nearest-rank quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct TimelineStat {
  MacAddress bssid;
  int days_observed = 0;
  int span_days = 0;  // last day - first day
};
struct TimelineStats {
  std::vector<TimelineStat> per_bssid;
  std::vector<CdfPoint> days_cdf;
  std::vector<CdfPoint> span_cdf;
  double median_days = 0;
  double median_span = 0;
};
// BSSIDs with no observations are left out.
TimelineStats timeline_stats(const TimelineStore& store);
TimelineStat timeline_stat(const MacAddress& bssid, std::span<const GeoObservation> observations);

}  // namespace mactrace
