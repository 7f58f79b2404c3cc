#include <doctest.h>

#include <sstream>

#include "mactrace/core/json.hpp"
#include "mactrace/core/listing.hpp"
#include "mactrace/core/mac_address.hpp"
#include "mactrace/core/oui_registry.hpp"
#include "mactrace/core/random.hpp"
#include "mactrace/core/time.hpp"
#include "oracles.hpp"

using namespace mactrace;

TEST_SUITE("core") {

TEST_CASE("parse_mac accepts the printed forms") {
  CHECK(parse_mac("A0:2B:CA:92:1C:DA").canonical() == "a02bca921cda");
  CHECK(parse_mac("10-29-ca-2a-be-2f").canonical() == "1029ca2abe2f");
  CHECK(parse_mac("a02bca921cda").canonical() == "a02bca921cda");
  CHECK(parse_mac("a0 2b ca 92 1c da") == parse_mac("a0.2b.ca.92.1c.da"));
  CHECK(parse_mac("a0:2b:ca:92:1c:da").format(':') == "a0:2b:ca:92:1c:da");
}

TEST_CASE("parse_mac rejects malformed text") {
  CHECK_THROWS_AS(parse_mac("00000000000"), MalformedMac);
  CHECK_THROWS_AS(parse_mac("0000000000000"), MalformedMac);
  CHECK_THROWS_AS(parse_mac("a0:2b-ca:92:1c:da"), MalformedMac);
  CHECK_THROWS_AS(parse_mac("a0:2b:ca:92:1c:dg"), MalformedMac);
  CHECK_THROWS_AS(parse_mac("a0_2b_ca_92_1c_da"), MalformedMac);
  CHECK_THROWS_AS(parse_mac(""), MalformedMac);
  CHECK_FALSE(try_parse_mac("a0:2b:ca:92:1c").has_value());
}

TEST_CASE("address parts") {
  const auto mac = parse_mac("00:18:0a:12:34:56");
  CHECK(mac.oui() == 0x00180a);
  CHECK(mac.nic() == 0x123456);
  CHECK(mac.band_value() == 0x1234);
  CHECK(MacAddress::from_value(mac.value()) == mac);
  CHECK(format_oui(0x00180a) == "00:18:0a");
  CHECK(format_oui(0xe89f80, '\0') == "e89f80");
  CHECK(parse_oui("00:18:0A") == std::optional<Oui>(0x00180a));
  CHECK(parse_oui("e89f80") == std::optional<Oui>(0xe89f80));
  CHECK_FALSE(parse_oui("e89f8").has_value());
}

TEST_CASE("parse/format round trip over every separator style") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto mac = MacAddress::from_value(rng.next() & 0xffffffffffffULL);
    for (const char sep : {':', '-', ' ', '.'}) {
      const auto text = mac.format(sep);
      CHECK(parse_mac(parse_mac(text).format(sep)) == parse_mac(text));
    }
    CHECK(parse_mac(mac.canonical()) == mac);
  }
}

TEST_CASE("registry from IEEE CSV") {
  std::istringstream csv{
      "Registry,Assignment,Organization Name,Organization Address\n"
      "MA-L,00180A,Cisco Meraki,\"500 Terry A Francois Blvd\nSan Francisco\"\n"
      "MA-L,E89F80,\"Belkin International, Inc.\",Playa Vista\n"
      "MA-M,E89F801,Someone,Somewhere\n"
      "MA-L,00180A,Duplicate,\n"};
  const auto registry = load_oui_registry(csv, RegistryFormat::ieee_csv);
  CHECK(registry.size() == 2);
  CHECK(registry.contains(0x00180a));
  CHECK(registry.contains("00:18:0a"));
  CHECK(registry.organization(0xe89f80) == std::optional<std::string_view>("Belkin International, Inc."));
  CHECK(registry.duplicate_count() == 1);
  CHECK(registry.skipped_count() == 2);  // header and MA-M row
}

TEST_CASE("registry from line pairs") {
  std::istringstream lines{"# comment\ne89f80 Belkin\n\n00180a\tCisco Meraki\nzzzzzz Bad\n"};
  const auto registry = load_oui_registry(lines, RegistryFormat::line_pairs);
  CHECK(registry.contains("e8:9f:80"));
  CHECK(registry.contains(0x00180a));
  CHECK(registry.size() == 2);
  CHECK(registry.skipped_count() == 1);
}

TEST_CASE("registry rejects empty and non UTF-8 input") {
  std::istringstream empty;
  CHECK_THROWS_AS(load_oui_registry(empty, RegistryFormat::ieee_csv), RegistryParse);
  std::istringstream bad{"e89f80 Bel\xffkin\n"};
  CHECK_THROWS_AS(load_oui_registry(bad, RegistryFormat::line_pairs), RegistryParse);
}

TEST_CASE("registry contains matches an independent scan over 10000 prefixes") {
  Rng rng(2024);
  std::ostringstream file;
  file << "# generated\n";
  for (int i = 0; i < 3000; ++i) {
    const auto prefix = static_cast<Oui>(rng.below(1 << 14));  // dense low range so probes hit
    file << format_oui(prefix, '\0') << (rng.chance(0.1) ? "\t" : " ") << "Org " << i << '\n';
    if (rng.chance(0.05)) file << "  xyz123 not a prefix\n";
  }
  const auto text = file.str();
  const auto expected = test::scan_line_pairs(text);
  std::istringstream in{text};
  const auto registry = load_oui_registry(in, RegistryFormat::line_pairs);
  CHECK(registry.size() == expected.size());
  for (int i = 0; i < 10000; ++i) {
    const auto prefix = static_cast<Oui>(rng.below(1 << 15));
    CHECK(registry.contains(prefix) == expected.contains(prefix));
  }
  CHECK(registry.size() == expected.size());  // lookups leave it unchanged
}

TEST_CASE("timestamps") {
  const auto ts = parse_timestamp("2024-09-01T12:30:05Z");
  CHECK(format_timestamp(ts) == "2024-09-01T12:30:05Z");
  CHECK(parse_timestamp("2024-09-01T12:30:05") == ts);
  CHECK(format_timestamp(parse_timestamp("2024-09-01")) == "2024-09-01T00:00:00Z");
  CHECK(format_date(utc_day(ts)) == "2024-09-01");
  CHECK(to_unix(from_unix(1725193805)) == 1725193805);
  CHECK_THROWS_AS(parse_timestamp("2024-13-01"), TimeParseError);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), TimeParseError);
}

TEST_CASE("conditions") {
  CHECK(parse_condition("New").kind == Condition::Kind::new_item);
  CHECK(parse_condition("Open box").kind == Condition::Kind::open_box);
  CHECK(parse_condition("Used").kind == Condition::Kind::used);
  CHECK(parse_condition("Seller refurbished").kind == Condition::Kind::refurbished);
  CHECK(parse_condition("For parts or not working").kind == Condition::Kind::for_parts);
  const auto other = parse_condition("Like a charm");
  CHECK(other.kind == Condition::Kind::other);
  CHECK(to_string(other) == "Like a charm");
}

TEST_CASE("listing validation") {
  Listing l;
  CHECK_THROWS_AS(validate(l), InvalidRecord);
  l.listing_id = "1";
  l.seller_location = {"US", "College Park", "207"};
  CHECK_NOTHROW(validate(l));
  l.seller_location.postal_prefix = "20A";
  CHECK_THROWS_AS(validate(l), InvalidRecord);
  l.seller_location.postal_prefix = "207";
  l.image_refs.push_back({"img", 16, ImageFormat::jpeg, {}, {}});
  CHECK_THROWS_AS(validate(l), InvalidRecord);
}

TEST_CASE("listing and candidate JSON round trip") {
  Listing l;
  l.listing_id = "123";
  l.marketplace_id = "EBAY_US";
  l.title = "Meraki MR18";
  l.condition = parse_condition("Open box");
  l.seller_location = {"US", "College Park", "207"};
  l.listed_at = parse_timestamp("2024-09-02T10:00:00Z");
  l.image_refs.push_back({"abc", 1600, ImageFormat::jpeg, std::filesystem::path("/tmp/x.jpg"),
                          parse_timestamp("2024-09-03T00:00:00Z")});
  l.sold_state = SoldState::sold;
  CHECK(Json(l).get<Listing>() == l);

  MacCandidate c{parse_mac("a02bca921cda"), "A0:2B:CA:92:1C:DA", "123", "abc", 2, 90, true};
  CHECK(Json(c).get<MacCandidate>() == c);
}

TEST_CASE("jsonl reader") {
  std::istringstream good{"{\"a\":1}\n\n{\"a\":2}\n"};
  int sum = 0;
  read_jsonl(good, [&](const Json& j) { sum += j.at("a").get<int>(); });
  CHECK(sum == 3);

  std::istringstream torn{"{\"a\":1}\n{\"a\":"};
  CHECK_THROWS_AS(read_jsonl(torn, [](const Json&) {}), JsonlError);
  std::istringstream torn2{"{\"a\":1}\n{\"a\":"};
  int n = 0;
  read_jsonl(torn2, [&](const Json&) { ++n; }, true);
  CHECK(n == 1);
  std::istringstream middle{"{\"a\":\n{\"a\":1}\n"};
  CHECK_THROWS_AS(read_jsonl(middle, [](const Json&) {}, true), JsonlError);
}

TEST_CASE("rng is reproducible and in range") {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
  Rng r(9);
  std::array<int, 7> hist{};
  for (int i = 0; i < 70000; ++i) {
    const auto x = r.below(7);
    REQUIRE(x < 7);
    ++hist[x];
  }
  for (const int h : hist) CHECK(h == doctest::Approx(10000).epsilon(0.05));
  for (int i = 0; i < 1000; ++i) {
    const auto u = r.unit();
    CHECK((u >= 0.0 && u < 1.0));
    const auto v = r.between(-3, 3);
    CHECK((v >= -3 && v <= 3));
  }
}

}  // TEST_SUITE
