#include <doctest.h>

#include <set>

#include "mactrace/extraction/extract.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace mactrace;
using test::TempDir;

namespace {

std::vector<test::OracleMatch> as_oracle(const std::vector<TextMatch>& matches) {
  std::vector<test::OracleMatch> out;
  for (const auto& m : matches) out.push_back({m.mac.canonical(), m.raw_match});
  return out;
}

std::set<std::string> addresses(std::string_view text) {
  std::set<std::string> out;
  for (const auto& m : scan_text(text)) out.insert(m.mac.canonical());
  return out;
}

SegmentResult segment(int index, int rotation, std::vector<std::string> lines) {
  SegmentResult r{index, rotation, {}};
  for (auto& t : lines) r.lines.push_back({std::move(t), 0.9, {}});
  return r;
}

ImageRef ref(std::string id) {
  ImageRef r;
  r.image_id = std::move(id);
  return r;
}

OuiRegistry registry_of(std::initializer_list<Oui> prefixes) {
  OuiRegistry r;
  for (const auto p : prefixes) r.insert(p, "org");
  return r;
}

}  // namespace

TEST_SUITE("extraction") {

TEST_CASE("scan examples") {
  auto m = scan_text("MAC: A0:2B:CA:92:1C:DA");
  REQUIRE(m.size() == 1);
  CHECK(m[0].mac.canonical() == "a02bca921cda");
  CHECK(m[0].raw_match == "A0:2B:CA:92:1C:DA");

  m = scan_text("S/N 4C1B2F9A0D3E");
  REQUIRE(m.size() == 2);  // bare raw form, then the normalized form
  CHECK(m[0].mac.canonical() == "4c1b2f9a0d3e");
  CHECK(m[1].mac == m[0].mac);

  CHECK(scan_text("hello world").empty());
  CHECK(scan_text("").empty());
}

TEST_CASE("a longer hex run is not an address") {
  CHECK(scan_text("0123456789abcdef").empty());
  CHECK(scan_text("id 0123456789abcd").empty());
  CHECK(addresses("x 0123456789ab y") == std::set<std::string>{"0123456789ab"});
  CHECK(scan_text("a0:2b:ca:92:1c:da7").empty());
  CHECK(scan_text("a0:2b-ca:92:1c:da").size() == 1);  // only the normalized form
}

TEST_CASE("scan matches the brute-force oracle on random text") {
  Rng rng(404);
  for (int i = 0; i < 3000; ++i) {
    const auto text = test::random_mac_text(rng);
    REQUIRE_MESSAGE(as_oracle(scan_text(text)) == test::brute_force_scan(text), text);
  }
}

TEST_CASE("normalization only removes matches and is idempotent") {
  Rng rng(405);
  for (int i = 0; i < 2000; ++i) {
    const auto text = test::random_mac_text(rng);
    const auto normalized = normalize_text(text);
    CHECK(normalize_text(normalized) == normalized);
    const auto full = addresses(text);
    for (const auto& a : addresses(normalized)) CHECK(full.count(a) == 1);
  }
}

TEST_CASE("shrinking the registry only clears oui_valid flags") {
  Rng rng(406);
  OuiRegistry full;
  std::vector<SegmentResult> results;
  for (int i = 0; i < 200; ++i) {
    const auto mac = MacAddress::from_value(rng.next() & 0xffffffffffffULL);
    if (rng.chance(0.5)) full.insert(mac.oui(), "org");
    results.push_back(segment(i, 0, {"MAC " + mac.format(':')}));
  }
  const auto half = full.filtered([](Oui p) { return p % 2 == 0; });
  const auto a = extract_candidates(results, full);
  const auto b = extract_candidates(results, half);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mac == b[i].mac);
    if (b[i].oui_valid) CHECK(a[i].oui_valid);
  }
}

TEST_CASE("candidates keep the first provenance of each address") {
  const std::vector<SegmentResult> results{segment(0, 0, {"nothing"}), segment(1, 90, {"MAC", "a0:2b:ca:92:1c:da"}),
                                           segment(2, 0, {"A0-2B-CA-92-1C-DA", "e89f80445566"})};
  const auto c = extract_candidates(results, registry_of({0xa02bca}), "L1", "img");
  REQUIRE(c.size() == 2);
  CHECK(c[0].segment_index == std::optional<int>(1));
  CHECK(c[0].rotation_deg == 90);
  CHECK(c[0].oui_valid);
  CHECK(c[0].listing_id == "L1");
  CHECK(c[1].mac.canonical() == "e89f80445566");
  CHECK_FALSE(c[1].oui_valid);
  CHECK(joined_text(results[1]) == "MAC\na0:2b:ca:92:1c:da");
}

TEST_CASE("word count takes the best rotation") {
  const std::vector<SegmentResult> results{segment(0, 0, {"a b c", "d"}), segment(1, 0, {"e"}),
                                           segment(0, 90, {"one two three four five six"})};
  CHECK(ocr_word_count(results) == 6);
  CHECK(ocr_word_count(std::vector<SegmentResult>{}) == 0);
}

TEST_CASE("fixture engine output shape") {
  TempDir dir;
  test::write_file(dir / "a.jpg", "x");
  FixtureOcrEngine engine;
  engine.add("a.jpg", {{{"MAC a0:2b:ca:92:1c:da"}, {"S/N 1"}}, 90});
  FixtureBackend backend(engine);
  auto r = backend.run(dir / "a.jpg", {});
  CHECK(r.size() == 8);
  std::size_t with_text = 0;
  for (const auto& s : r) with_text += s.lines.empty() ? 0 : 1;
  CHECK(with_text == 2);
  r = backend.run(dir / "a.jpg", {false, {0, 90}});
  REQUIRE(r.size() == 2);
  CHECK(r[1].lines.size() == 2);
  CHECK_THROWS_AS(backend.run(dir / "missing.jpg", {}), BackendImageError);
}

TEST_CASE("listing-level dedup and per-image failures") {
  TempDir dir;
  FixtureOcrEngine engine;
  for (const auto* name : {"1.jpg", "2.jpg", "3.jpg"}) test::write_file(dir / name, "x");
  engine.add("1.jpg", {{{"a0:2b:ca:92:1c:da"}}, 0});
  engine.add("2.jpg", {{{"A0-2B-CA-92-1C-DA"}}, 0});
  engine.add("3.jpg", {{{"e8:9f:80:44:55:66"}}, 0});
  FixtureBackend backend(engine);
  const auto registry = registry_of({0xa02bca});

  Listing same;
  same.listing_id = "L";
  same.image_refs = {ref("1"), ref("2")};
  same.image_refs[0].local_path = dir / "1.jpg";
  same.image_refs[1].local_path = dir / "2.jpg";
  auto x = extract_from_listing(same, backend, registry);
  CHECK(x.candidates.size() == 1);
  CHECK(x.candidates[0].image_id == "1");
  CHECK(x.images.size() == 2);

  Listing distinct = same;
  distinct.image_refs[1].local_path = dir / "3.jpg";
  CHECK(extract_from_listing(distinct, backend, registry).candidates.size() == 2);

  Listing broken = distinct;
  broken.image_refs.push_back(ref("gone"));
  broken.image_refs.back().local_path = dir / "gone.jpg";
  x = extract_from_listing(broken, backend, registry);
  CHECK(x.error_count() == 1);
  CHECK(x.candidates.size() == 2);
  broken.image_refs.push_back(ref("unfetched"));
  CHECK(extract_from_listing(broken, backend, registry).error_count() == 2);

  FixtureBackend other(engine);
  std::vector<OcrBackend*> backends{&backend, &other};
  const std::vector<Listing> listings{same, distinct, broken, same};
  const auto all = extract_from_listings(listings, backends, registry);
  REQUIRE(all.size() == 4);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].listing_id == listings[i].listing_id);
  CHECK(all[1].candidates.size() == 2);
}

}  // TEST_SUITE
