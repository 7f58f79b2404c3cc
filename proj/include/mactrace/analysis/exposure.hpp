#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mactrace/analysis/geo.hpp"
#include "mactrace/analysis/postal.hpp"
#include "mactrace/core/listing.hpp"
#include "mactrace/geolocate/timeline.hpp"

namespace mactrace {

enum class PostalOutcome { match3, match2, mismatch, unresolvable };

std::string_view to_string(PostalOutcome outcome);

// Which party a geolocation is attributed to. The seller reference is the last observation at
// or before the auction; the buyer reference is the first one after it.
enum class Side { seller, buyer };

std::string_view to_string(Side side);

std::optional<GeoObservation> reference_observation(const BssidTimeline& timeline, Side side);

/// Compares the postal code at the reference observation with the listing's seller prefix.
///  US: match3 when the first three digits agree, match2 when only the first two do.
///  GB: match3 when the outward codes agree.
///  Other countries: match3 when the resolved code starts with the listing prefix.
/// Unresolvable when there is no reference observation, no seller prefix, the resolver has
/// no answer or fails, or the point resolves outside the seller's country.
PostalOutcome postal_match(const BssidTimeline& timeline, const Listing& listing, PostalResolver& resolver,
                           Side side = Side::seller);

struct MatchTally {
  std::size_t total = 0;
  std::size_t match3 = 0;
  std::size_t match2 = 0;  // first two digits only
  std::size_t mismatch = 0;
  std::size_t unresolvable = 0;

  std::size_t resolved() const { return match3 + match2 + mismatch; }
  // Shares of resolved comparisons; nullopt when nothing resolved.
  std::optional<double> match3_rate() const;
  std::optional<double> match2_or_better_rate() const;
  void add(PostalOutcome outcome);
};

struct ExposureRow {
  Category category = Category::never;
  Side side = Side::seller;
  std::string country;  // seller country, or "ALL"
  MatchTally tally;
};

struct ExposureSummary {
  CategoryCounts counts;
  std::size_t population = 0;
  // Always holds the four "ALL" rows (pre_only/seller, post_only/buyer, both/seller,
  // both/buyer) followed by per-country rows in (category, side, country) order.
  std::vector<ExposureRow> rows;

  const ExposureRow* find(Category category, Side side, const std::string& country = "ALL") const;
};

// Timelines whose listing is unknown are counted in the category table but not compared.
ExposureSummary exposure_summary(std::span<const BssidTimeline> timelines,
                                 const std::map<std::string, Listing>& listings, PostalResolver& resolver);

inline constexpr double kStationaryThresholdKm = 1.0;

struct Movement {
  MacAddress bssid;
  std::string listing_id;
  double distance_km = 0;
  bool moved = false;
};

struct MovementReport {
  std::vector<Movement> entries;
  std::size_t stationary = 0;
  std::size_t moved = 0;
  std::size_t skipped = 0;  // fewer than two observations
  double threshold_km = kStationaryThresholdKm;
  std::vector<CdfPoint> cdf;  // distance in km; plot with a log x axis

  double stationary_fraction() const;
};

/// First-to-last distance per distinct BSSID among `both` timelines. When `sold_filter` is set,
/// only listings in that sold state are kept (listings absent from `sold_by_listing` count as
/// unknown).
MovementReport movement_report(std::span<const BssidTimeline> timelines,
                               const std::map<std::string, SoldState>& sold_by_listing,
                               std::optional<SoldState> sold_filter = std::nullopt,
                               double threshold_km = kStationaryThresholdKm);

struct MislabeledListing {
  std::string listing_id;
  MacAddress bssid;
  Condition condition;
  Timestamp first_pre_auction{};
};

struct MislabelReport {
  std::vector<MislabeledListing> flagged;
  std::size_t new_count = 0;
  std::size_t open_box_count = 0;
  std::optional<double> open_box_share() const;
};

// Listings sold as new or open box whose device was geolocated at or before the auction.
MislabelReport condition_mismatch(const std::map<std::string, Listing>& listings,
                                  std::span<const BssidTimeline> timelines);

struct SensitiveHit {
  MacAddress bssid;
  std::string listing_id;
  std::string region;
  std::size_t pre_auction = 0;   // observations inside the region at or before the auction
  std::size_t post_auction = 0;  // and after it
};

struct SensitiveReport {
  std::vector<SensitiveHit> hits;
  std::size_t distinct_bssids = 0;
  std::size_t bssids_post_auction = 0;
};

SensitiveReport sensitive_hits(std::span<const BssidTimeline> timelines,
                               std::span<const SensitiveRegion> regions);

}  // namespace mactrace
