#include <doctest.h>

#include <sstream>

#include "mactrace/analysis/report.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace mactrace;
using std::chrono::days;

namespace {

const Timestamp kAuction = parse_timestamp("2024-09-10T00:00:00Z");

struct City {
  GeoPoint a;
  GeoPoint b;
  double km;
};

// Hand-computed with the spherical law of cosines, R = 6371 km.
const City kCities[] = {
    {{51.5074, -0.1278}, {48.8566, 2.3522}, 343.56},
    {{40.7128, -74.0060}, {34.0522, -118.2437}, 3935.75},
    {{35.6762, 139.6503}, {-33.8688, 151.2093}, 7825.82},
    {{52.5200, 13.4050}, {55.7558, 37.6173}, 1608.83},
    {{-0.1807, -78.4678}, {1.3521, 103.8198}, 19729.33},
};

MacAddress mac(std::uint64_t v) { return MacAddress::from_value(0xe89f80000000ULL + v); }

BssidTimeline make_timeline(std::uint64_t id, const std::string& listing, std::vector<std::pair<int, GeoPoint>> points) {
  BssidTimeline t;
  t.bssid = mac(id);
  t.listing_id = listing;
  t.auction_ts = kAuction;
  for (const auto& [day, p] : points) t.observations.push_back({t.bssid, p.lat, p.lon, std::nullopt, kAuction + days{day}});
  t.category = categorize(t);
  return t;
}

Listing listing_in(const std::string& id, const std::string& country, const std::string& prefix,
                   Condition::Kind kind = Condition::Kind::used) {
  Listing l;
  l.listing_id = id;
  l.seller_location = {country, "", prefix};
  l.condition.kind = kind;
  return l;
}

const GeoPoint kCollegePark{38.99, -76.94};
const GeoPoint kSilverSpring{39.02, -77.03};
const GeoPoint kBaltimore{39.29, -76.61};
const GeoPoint kLondon{51.50, -0.12};

TablePostalResolver resolver() {
  return TablePostalResolver({{kCollegePark, {"US", "20740"}},
                              {kSilverSpring, {"US", "20902"}},
                              {kBaltimore, {"US", "21201"}},
                              {kLondon, {"GB", "SW1A 1AA"}}});
}

SensitiveRegion unit_square() { return make_region("sq", {{0, 0}, {0, 1}, {1, 1}, {1, 0}}); }

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("haversine on known city pairs") {
  for (const auto& c : kCities) {
    CHECK(haversine_km(c.a, c.b) == doctest::Approx(c.km).epsilon(0.005));
    CHECK(haversine_km(c.a, c.b) == doctest::Approx(test::vector_distance_km(c.a.lat, c.a.lon, c.b.lat, c.b.lon)).epsilon(1e-9));
  }
  CHECK(haversine_km({10, 170}, {-10, -10}) == doctest::Approx(3.14159265358979 * 6371).epsilon(1e-9));
}

TEST_CASE("haversine is a metric on random points") {
  Rng rng(5);
  auto point = [&] { return GeoPoint{rng.uniform(-90, 90), rng.uniform(-180, 180)}; };
  for (int i = 0; i < 2000; ++i) {
    const auto a = point();
    const auto b = point();
    const auto c = point();
    CHECK(haversine_km(a, a) == 0.0);
    CHECK(haversine_km(a, b) == haversine_km(b, a));
    CHECK(haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-6);
    CHECK(haversine_km(a, b) <= 20015.09);
    CHECK(haversine_km(a, b) == doctest::Approx(test::vector_distance_km(a.lat, a.lon, b.lat, b.lon)).epsilon(1e-6));
  }
}

TEST_CASE("polygon containment examples") {
  const auto sq = unit_square();
  CHECK(contains(sq, {0.5, 0.5}));
  CHECK_FALSE(contains(sq, {1.5, 0.5}));
  CHECK(contains(sq, {0, 0.5}));
  CHECK(contains(sq, {1, 1}));
  const auto closed = make_region("c", {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}});
  CHECK(closed.ring.size() == 4);
  CHECK_THROWS_AS(make_region("line", {{0, 0}, {1, 1}}), RegionError);
  CHECK_THROWS_AS(make_region("bowtie", {{0, 0}, {1, 1}, {0, 1}, {1, 0}}), RegionError);
}

TEST_CASE("polygon containment agrees with the winding number") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto ring = test::random_star_polygon(rng, 10, 20, 0.5, 3.0, 3 + static_cast<int>(rng.below(12)));
    std::vector<GeoPoint> vertices;
    for (const auto& [x, y] : ring) vertices.push_back({y, x});
    const auto region = make_region("r", vertices);
    for (int k = 0; k < 20; ++k) {
      const double x = rng.uniform(16, 24);
      const double y = rng.uniform(6, 14);
      if (test::on_boundary(ring, x, y, 1e-9)) continue;
      CHECK(contains(region, {y, x}) == test::inside_by_winding(ring, x, y));
    }
    for (const auto& [x, y] : ring) CHECK(contains(region, {y, x}));
  }
}

TEST_CASE("regions load from file") {
  test::TempDir dir;
  test::write_file(dir / "r.jsonl", "{\"name\":\"base\",\"ring\":[[0,0],[0,2],[2,2],[2,0]]}\n");
  const auto regions = load_regions(dir / "r.jsonl");
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].name == "base");
  CHECK(contains(regions[0], {1, 1}));
}

TEST_CASE("postal matching") {
  auto r = resolver();
  const auto seller = listing_in("L", "US", "207");
  CHECK(postal_match(make_timeline(1, "L", {{-1, kCollegePark}}), seller, r) == PostalOutcome::match3);
  CHECK(postal_match(make_timeline(1, "L", {{-1, kSilverSpring}}), seller, r) == PostalOutcome::match2);
  CHECK(postal_match(make_timeline(1, "L", {{-1, kBaltimore}}), seller, r) == PostalOutcome::mismatch);
  CHECK(postal_match(make_timeline(1, "L", {{-1, kLondon}}), seller, r) == PostalOutcome::unresolvable);
  CHECK(postal_match(make_timeline(1, "L", {{-1, {0, 0}}}), seller, r) == PostalOutcome::unresolvable);
  CHECK(postal_match(make_timeline(1, "L", {{2, kCollegePark}}), seller, r) == PostalOutcome::unresolvable);
  CHECK(postal_match(make_timeline(1, "L", {{2, kCollegePark}}), seller, r, Side::buyer) == PostalOutcome::match3);
  CHECK(postal_match(make_timeline(1, "L", {{-1, kLondon}}), listing_in("L", "GB", "sw1a"), r) == PostalOutcome::match3);
  CHECK(postal_match(make_timeline(1, "L", {{-1, kCollegePark}}), listing_in("L", "US", ""), r) ==
        PostalOutcome::unresolvable);
  CHECK(outward_code(" sw1a 1aa") == "SW1A");

  // The seller reference is the last observation at or before the auction.
  const auto moved = make_timeline(1, "L", {{-9, kBaltimore}, {0, kCollegePark}, {3, kBaltimore}});
  CHECK(reference_observation(moved, Side::seller)->lat == kCollegePark.lat);
  CHECK(reference_observation(moved, Side::buyer)->lat == kBaltimore.lat);
}

TEST_CASE("a three-digit match is always a two-digit match") {
  Rng rng(8);
  std::vector<TablePostalResolver::Entry> entries;
  for (int i = 0; i < 50; ++i) {
    char code[6];
    std::snprintf(code, sizeof code, "%05d", static_cast<int>(rng.below(100000)));
    entries.push_back({{static_cast<double>(i), 0}, {"US", code}});
  }
  TablePostalResolver r(entries);
  for (int i = 0; i < 500; ++i) {
    const auto& e = rng.pick(entries);
    char prefix[4];
    std::snprintf(prefix, sizeof prefix, "%03d", static_cast<int>(rng.below(1000)));
    const auto outcome = postal_match(make_timeline(1, "L", {{-1, e.point}}), listing_in("L", "US", prefix), r);
    const bool three = e.postal.postal_code.substr(0, 3) == prefix;
    const bool two = e.postal.postal_code.substr(0, 2) == std::string(prefix).substr(0, 2);
    CHECK((outcome == PostalOutcome::match3) == three);
    if (three) CHECK(two);
    CHECK((outcome == PostalOutcome::match3 || outcome == PostalOutcome::match2) == two);
  }
}

TEST_CASE("exposure rates") {
  auto r = resolver();
  std::map<std::string, Listing> listings;
  std::vector<BssidTimeline> timelines;
  for (int i = 0; i < 100; ++i) {
    const auto id = "pre" + std::to_string(i);
    listings[id] = listing_in(id, "US", "207");
    timelines.push_back(make_timeline(static_cast<std::uint64_t>(i), id, {{-2, i < 50 ? kCollegePark : kBaltimore}}));
  }
  for (int i = 0; i < 100; ++i) {
    const auto id = "post" + std::to_string(i);
    listings[id] = listing_in(id, "US", "207");
    timelines.push_back(make_timeline(static_cast<std::uint64_t>(1000 + i), id, {{5, i < 6 ? kCollegePark : kBaltimore}}));
  }
  timelines.push_back(make_timeline(5000, "unknown-listing", {}));
  const auto summary = exposure_summary(timelines, listings, r);
  CHECK(summary.population == 201);
  CHECK(summary.counts.pre_only == 100);
  CHECK(summary.counts.post_only == 100);
  CHECK(summary.counts.never == 1);
  CHECK(summary.find(Category::pre_only, Side::seller)->tally.match3_rate() == std::optional<double>(0.5));
  CHECK(summary.find(Category::post_only, Side::buyer)->tally.match3_rate() == std::optional<double>(0.06));
  CHECK(summary.find(Category::pre_only, Side::seller, "US")->tally.total == 100);
  CHECK_FALSE(summary.find(Category::both, Side::seller)->tally.match3_rate().has_value());

  const auto empty = exposure_summary(std::span<const BssidTimeline>{}, {}, r);
  CHECK(empty.population == 0);
  CHECK(empty.rows.size() == 4);
  for (const auto& row : empty.rows) CHECK(row.tally.total == 0);

  std::ostringstream out;
  write_exposure_table(out, summary);
  CHECK(out.str().find("\"match3_rate\":0.5") != std::string::npos);
}

TEST_CASE("movement between first and last sighting") {
  std::vector<BssidTimeline> timelines;
  for (int i = 0; i < 10; ++i) {
    const GeoPoint end = i < 5 ? GeoPoint{kCollegePark.lat + 0.001, kCollegePark.lon} : GeoPoint{kCollegePark.lat + 4.5, kCollegePark.lon};
    timelines.push_back(make_timeline(static_cast<std::uint64_t>(i), "L" + std::to_string(i), {{-3, kCollegePark}, {4, end}}));
  }
  timelines.push_back(timelines[0]);  // same BSSID counted once
  timelines.push_back(make_timeline(99, "pre", {{-1, kCollegePark}}));
  const auto report = movement_report(timelines, {});
  CHECK(report.stationary == 5);
  CHECK(report.moved == 5);
  CHECK(report.stationary_fraction() == 0.5);
  CHECK(report.entries[9].distance_km == doctest::Approx(500.4).epsilon(0.01));
  CHECK(report.cdf.back().fraction == 1.0);

  std::map<std::string, SoldState> sold{{"L0", SoldState::sold}, {"L7", SoldState::sold}};
  const auto only_sold = movement_report(timelines, sold, SoldState::sold);
  CHECK(only_sold.stationary == 1);
  CHECK(only_sold.moved == 1);
  CHECK(movement_report(timelines, sold, SoldState::unknown).entries.size() == 8);

  std::ostringstream csv;
  write_cdf_csv(csv, report.cdf, "distance_km", true);
  CHECK(csv.str().rfind("# x_scale=log\ndistance_km,fraction\n", 0) == 0);
}

TEST_CASE("condition mislabels") {
  std::map<std::string, Listing> listings{{"n", listing_in("n", "US", "207", Condition::Kind::new_item)},
                                          {"o", listing_in("o", "US", "207", Condition::Kind::open_box)},
                                          {"u", listing_in("u", "US", "207", Condition::Kind::used)},
                                          {"late", listing_in("late", "US", "207", Condition::Kind::new_item)}};
  const std::vector<BssidTimeline> timelines{make_timeline(1, "n", {{-5, kCollegePark}}),
                                             make_timeline(2, "o", {{0, kCollegePark}, {2, kCollegePark}}),
                                             make_timeline(3, "u", {{-5, kCollegePark}}),
                                             make_timeline(4, "late", {{1, kCollegePark}})};
  const auto report = condition_mismatch(listings, timelines);
  CHECK(report.flagged.size() == 2);
  CHECK(report.new_count == 1);
  CHECK(report.open_box_count == 1);
  CHECK(report.open_box_share() == std::optional<double>(0.5));
  CHECK_FALSE(condition_mismatch({}, timelines).open_box_share().has_value());
}

TEST_CASE("sensitive regions") {
  const std::vector<SensitiveRegion> regions{make_region("base", {{38.9, -77.0}, {38.9, -76.9}, {39.1, -76.9}, {39.1, -77.0}})};
  const std::vector<BssidTimeline> timelines{make_timeline(1, "a", {{-2, kCollegePark}, {3, kCollegePark}}),
                                             make_timeline(2, "b", {{-2, kCollegePark}, {3, kBaltimore}}),
                                             make_timeline(3, "c", {{-2, kBaltimore}})};
  const auto report = sensitive_hits(timelines, regions);
  CHECK(report.hits.size() == 2);
  CHECK(report.distinct_bssids == 2);
  CHECK(report.bssids_post_auction == 1);
  CHECK(report.hits[0].pre_auction == 1);
  CHECK(report.hits[0].post_auction == 1);
}

TEST_CASE("model bands") {
  std::vector<LabeledMac> labeled;
  for (const auto v : {0x1000, 0x1100, 0x1200}) labeled.push_back({MacAddress::from_value(0x00180a000000ULL + (v << 8)), "MR18"});
  for (const auto v : {0x4000, 0x4010}) labeled.push_back({MacAddress::from_value(0x00180a000000ULL + (v << 8)), "MR33"});
  const auto index = build_model_bands(labeled);
  const auto& models = index.by_oui.at(0x00180a);
  REQUIRE(models.size() == 2);
  CHECK(models[0].model == "MR18");
  REQUIRE(models[0].intervals.size() == 1);
  CHECK(models[0].intervals[0].lo == 0x1000);
  CHECK(models[0].intervals[0].hi == 0x1200);
  CHECK(models[0].intervals[0].support == 3);

  auto guess = infer_model(MacAddress::from_value(0x00180a115500ULL), index);
  REQUIRE(guess.size() == 1);
  CHECK(guess[0].model == "MR18");
  CHECK(infer_model(MacAddress::from_value(0x00180a300000ULL), index).empty());
  CHECK(infer_model(MacAddress::from_value(0xe89f80101010ULL), index).empty());

  const auto tight = build_model_bands(labeled, 0xff);
  CHECK(tight.by_oui.at(0x00180a)[0].intervals.size() == 3);
  CHECK_THROWS(build_model_bands(std::span<const LabeledMac>{}));

  std::ostringstream csv;
  write_band_scatter_csv(csv, labeled);
  CHECK(csv.str().rfind("byte4,byte5,model\n16,0,MR18\n", 0) == 0);
}

TEST_CASE("banded fixture: held-out addresses land in their own model") {
  const auto labeled = test::banded_fixture(3, 200);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    std::vector<LabeledMac> rest = labeled;
    rest.erase(rest.begin() + static_cast<long>(i));
    const auto guess = infer_model(labeled[i].mac, build_model_bands(rest));
    if (!guess.empty() && guess[0].model == labeled[i].model) ++correct;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(labeled.size()) >= 0.9);

  const auto index = build_model_bands(labeled);
  for (const auto& item : labeled) {
    const auto guess = infer_model(item.mac, index);
    REQUIRE_FALSE(guess.empty());
    CHECK(guess[0].model == item.model);
  }
}

}  // TEST_SUITE
