#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mactrace/core/json.hpp"

namespace mactrace {

/// Shape of a synthetic marketplace plus the WPS, OCR and postal data needed to run every
/// stage offline. Rates are exact: each is turned into round(rate * n) constructed items.
struct FixtureSpec {
  std::size_t n_listings = 1000;
  std::vector<std::string> brands = {"TP-Link", "Netgear", "Ubiquiti", "Linksys", "ASUS"};
  double mac_density = 0.18;      // listings showing a registered address in an image
  double mover_fraction = 0.5;    // share of `both` devices placed more than 1 km apart
  double match3_rate_pre = 0.5;   // pre_only: device located in the seller's prefix
  double match3_rate_post = 0.06; // post_only: buyer located in the seller's prefix
  double match3_rate_both = 0.5;  // both: seller side
  double pre_share = 0.40;
  double post_share = 0.25;
  double both_share = 0.15;       // never takes the remainder
  double unresolvable_rate = 0.05;  // pre/post devices located outside the seller's country
  double second_mac_rate = 0.1;   // labels printing a second radio address
  double distractor_rate = 0.03;  // listings showing an address with an unregistered OUI
  double foreign_seller_rate = 0.15;
  std::string marketplace_id = "EBAY_US";
  std::string start_date = "2024-09-01";
  int listing_window_days = 10;
  int poll_days = 30;
};

// Throws Error when a rate is outside [0, 1], the shares exceed 1 or a count is zero.
void validate(const FixtureSpec& spec);
FixtureSpec fixture_spec_from_json(const Json& j);
Json fixture_spec_to_json(const FixtureSpec& spec);

/// What was constructed, for checking the pipeline against.
struct FixtureTruth {
  std::size_t listings = 0;
  std::size_t mac_listings = 0;
  std::size_t distractor_listings = 0;
  std::size_t second_macs = 0;
  std::size_t pre_only = 0;
  std::size_t post_only = 0;
  std::size_t both = 0;
  std::size_t never = 0;  // primary addresses only; second radios are never located
  std::size_t movers = 0;
  std::size_t stationary = 0;
  std::size_t pre_resolvable = 0;
  std::size_t pre_match3 = 0;
  std::size_t post_resolvable = 0;
  std::size_t post_match3 = 0;
  std::size_t both_match3 = 0;
  std::size_t sold = 0;
  std::string poll_start;  // first polling day
};

Json truth_to_json(const FixtureTruth& truth);
FixtureTruth truth_from_json(const Json& j);

/// Writes into `dir` (created if needed), byte-identical for the same seed and spec:
///   marketplace.jsonl  listings with a "brand" member
///   images/            one small JPEG per image id
///   ocr.jsonl          text per "<listing_id>_<image_id>.jpg" for the fixture OCR backend
///   oui.txt            registry, "<hex6> <organization>" lines
///   wps.jsonl          availability windows from the polling start
///   history.jsonl      observations from before each listing
///   postal.jsonl       postal centroids for the table resolver
///   regions.jsonl      sensitive regions
///   labels.jsonl       {mac, model} pairs for band inference
///   pages.jsonl        {listing_id, status, body} listing pages for sold detection
///   truth.json         FixtureTruth plus the spec and seed
/// Returns the list of files written, relative to `dir`.
std::vector<std::string> generate_fixtures(std::uint64_t seed, const FixtureSpec& spec,
                                           const std::filesystem::path& dir, FixtureTruth* truth = nullptr);

}  // namespace mactrace
