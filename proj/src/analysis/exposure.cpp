#include "mactrace/analysis/exposure.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace mactrace {

std::string_view to_string(PostalOutcome outcome) {
  switch (outcome) {
    case PostalOutcome::match3: return "match3";
    case PostalOutcome::match2: return "match2";
    case PostalOutcome::mismatch: return "mismatch";
    case PostalOutcome::unresolvable: return "unresolvable";
  }
  return "unresolvable";
}

std::string_view to_string(Side side) { return side == Side::seller ? "seller" : "buyer"; }

std::optional<GeoObservation> reference_observation(const BssidTimeline& timeline, Side side) {
  const auto& obs = timeline.observations;
  if (side == Side::seller) {
    for (auto it = obs.rbegin(); it != obs.rend(); ++it) {
      if (it->observed_at <= timeline.auction_ts) return *it;
    }
  } else {
    for (const auto& o : obs) {
      if (o.observed_at > timeline.auction_ts) return o;
    }
  }
  return std::nullopt;
}

PostalOutcome postal_match(const BssidTimeline& timeline, const Listing& listing, PostalResolver& resolver,
                           Side side) {
  const auto ref = reference_observation(timeline, side);
  const auto& seller = listing.seller_location;
  if (!ref || seller.postal_prefix.empty()) return PostalOutcome::unresolvable;

  std::optional<ResolvedPostal> resolved;
  try {
    resolved = resolver.resolve({ref->lat, ref->lon});
  } catch (const ResolverError&) {
    return PostalOutcome::unresolvable;
  }
  if (!resolved || resolved->country != seller.country) return PostalOutcome::unresolvable;

  const std::string_view code = resolved->postal_code;
  const std::string_view prefix = seller.postal_prefix;
  if (seller.country == "US") {
    if (code.size() < 3 || prefix.size() < 3) return PostalOutcome::unresolvable;
    if (code.substr(0, 3) == prefix.substr(0, 3)) return PostalOutcome::match3;
    if (code.substr(0, 2) == prefix.substr(0, 2)) return PostalOutcome::match2;
    return PostalOutcome::mismatch;
  }
  if (seller.country == "GB") {
    return outward_code(code) == outward_code(prefix) ? PostalOutcome::match3 : PostalOutcome::mismatch;
  }
  return code.starts_with(prefix) ? PostalOutcome::match3 : PostalOutcome::mismatch;
}

std::optional<double> MatchTally::match3_rate() const {
  if (resolved() == 0) return std::nullopt;
  return static_cast<double>(match3) / static_cast<double>(resolved());
}

std::optional<double> MatchTally::match2_or_better_rate() const {
  if (resolved() == 0) return std::nullopt;
  return static_cast<double>(match3 + match2) / static_cast<double>(resolved());
}

void MatchTally::add(PostalOutcome outcome) {
  ++total;
  switch (outcome) {
    case PostalOutcome::match3: ++match3; break;
    case PostalOutcome::match2: ++match2; break;
    case PostalOutcome::mismatch: ++mismatch; break;
    case PostalOutcome::unresolvable: ++unresolvable; break;
  }
}

const ExposureRow* ExposureSummary::find(Category category, Side side, const std::string& country) const {
  for (const auto& row : rows) {
    if (row.category == category && row.side == side && row.country == country) return &row;
  }
  return nullptr;
}

ExposureSummary exposure_summary(std::span<const BssidTimeline> timelines,
                                 const std::map<std::string, Listing>& listings, PostalResolver& resolver) {
  ExposureSummary summary;
  summary.counts = count_categories(timelines);
  summary.population = timelines.size();

  const std::pair<Category, Side> kinds[] = {{Category::pre_only, Side::seller},
                                              {Category::post_only, Side::buyer},
                                              {Category::both, Side::seller},
                                              {Category::both, Side::buyer}};
  for (const auto& [category, side] : kinds) summary.rows.push_back({category, side, "ALL", {}});

  std::map<std::tuple<Category, Side, std::string>, MatchTally> by_country;
  for (const auto& timeline : timelines) {
    const auto it = listings.find(timeline.listing_id);
    if (it == listings.end()) continue;
    for (std::size_t k = 0; k < std::size(kinds); ++k) {
      const auto [category, side] = kinds[k];
      if (timeline.category != category) continue;
      const auto outcome = postal_match(timeline, it->second, resolver, side);
      summary.rows[k].tally.add(outcome);
      by_country[{category, side, it->second.seller_location.country}].add(outcome);
    }
  }
  for (auto& [key, tally] : by_country) {
    summary.rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), tally});
  }
  return summary;
}

double MovementReport::stationary_fraction() const {
  const auto n = stationary + moved;
  return n == 0 ? 0.0 : static_cast<double>(stationary) / static_cast<double>(n);
}

MovementReport movement_report(std::span<const BssidTimeline> timelines,
                               const std::map<std::string, SoldState>& sold_by_listing,
                               std::optional<SoldState> sold_filter, double threshold_km) {
  MovementReport report;
  report.threshold_km = threshold_km;
  std::set<MacAddress> seen;
  std::vector<double> distances;
  for (const auto& timeline : timelines) {
    if (timeline.category != Category::both) continue;
    if (sold_filter) {
      const auto it = sold_by_listing.find(timeline.listing_id);
      const auto state = it == sold_by_listing.end() ? SoldState::unknown : it->second;
      if (state != *sold_filter) continue;
    }
    if (!seen.insert(timeline.bssid).second) continue;
    const auto& obs = timeline.observations;
    if (obs.size() < 2) {
      ++report.skipped;
      continue;
    }
    const double d = haversine_km({obs.front().lat, obs.front().lon}, {obs.back().lat, obs.back().lon});
    const bool moved = d > threshold_km;
    report.entries.push_back({timeline.bssid, timeline.listing_id, d, moved});
    ++(moved ? report.moved : report.stationary);
    distances.push_back(d);
  }
  report.cdf = empirical_cdf(std::move(distances));
  return report;
}

std::optional<double> MislabelReport::open_box_share() const {
  if (flagged.empty()) return std::nullopt;
  return static_cast<double>(open_box_count) / static_cast<double>(flagged.size());
}

MislabelReport condition_mismatch(const std::map<std::string, Listing>& listings,
                                  std::span<const BssidTimeline> timelines) {
  MislabelReport report;
  std::set<std::string> flagged_ids;
  for (const auto& timeline : timelines) {
    const auto it = listings.find(timeline.listing_id);
    if (it == listings.end()) continue;
    const auto kind = it->second.condition.kind;
    if (kind != Condition::Kind::new_item && kind != Condition::Kind::open_box) continue;
    const auto& obs = timeline.observations;
    if (obs.empty() || obs.front().observed_at > timeline.auction_ts) continue;
    if (!flagged_ids.insert(timeline.listing_id).second) continue;
    report.flagged.push_back({timeline.listing_id, timeline.bssid, it->second.condition, obs.front().observed_at});
    ++(kind == Condition::Kind::new_item ? report.new_count : report.open_box_count);
  }
  return report;
}

SensitiveReport sensitive_hits(std::span<const BssidTimeline> timelines,
                               std::span<const SensitiveRegion> regions) {
  SensitiveReport report;
  std::set<MacAddress> any;
  std::set<MacAddress> post;
  for (const auto& timeline : timelines) {
    for (const auto& region : regions) {
      SensitiveHit hit{timeline.bssid, timeline.listing_id, region.name};
      for (const auto& o : timeline.observations) {
        if (!contains(region, {o.lat, o.lon})) continue;
        ++(o.observed_at <= timeline.auction_ts ? hit.pre_auction : hit.post_auction);
      }
      if (hit.pre_auction + hit.post_auction == 0) continue;
      any.insert(timeline.bssid);
      if (hit.post_auction > 0) post.insert(timeline.bssid);
      report.hits.push_back(std::move(hit));
    }
  }
  report.distinct_bssids = any.size();
  report.bssids_post_auction = post.size();
  return report;
}

}  // namespace mactrace
