#include "mactrace/pipeline/stages.hpp"

#include <set>

#include "mactrace/extraction/extract.hpp"
#include "mactrace/ingest/listing_store.hpp"
#include "mactrace/ingest/sold.hpp"

namespace mactrace {

namespace {

std::string image_key(const std::string& listing_id, const std::string& image_id) {
  return listing_id + "/" + image_id;
}

bool fully_fetched(const Listing& listing) {
  if (listing.image_refs.empty()) return false;
  for (const auto& ref : listing.image_refs) {
    if (!ref.local_path) return false;
  }
  return true;
}

}  // namespace

std::vector<Listing> stored_listings(Store& store) { return ListingStore(store.table(Store::kListings)).all(); }

std::map<std::string, Listing> listings_by_id(Store& store) {
  std::map<std::string, Listing> out;
  for (auto& l : stored_listings(store)) out.emplace(l.listing_id, std::move(l));
  return out;
}

FetchStageReport fetch_stage(Store& store, ByteFetcher& fetcher, const std::filesystem::path& images_dir,
                             const FetchOptions& options) {
  FetchStageReport report;
  ListingStore listings(store.table(Store::kListings));
  for (const auto& listing : listings.all()) {
    auto fetched = fetch_images(listing, fetcher, images_dir, options);
    ++report.listings;
    report.downloaded += static_cast<std::size_t>(fetched.downloaded);
    report.skipped += static_cast<std::size_t>(fetched.skipped);
    for (const auto& e : fetched.errors) report.errors.push_back(image_key(listing.listing_id, e.image_id) + ": " + e.message);
    if (!(fetched.listing == listing)) listings.update(fetched.listing);
  }
  return report;
}

ExtractStageReport extract_stage(Store& store, std::span<OcrBackend* const> backends, const OuiRegistry& registry,
                                 const RunOptions& options) {
  ExtractStageReport report;
  auto& extractions = store.table(Store::kExtractions);
  auto& candidates = store.table(Store::kCandidates);

  std::vector<Listing> todo;
  for (auto& listing : stored_listings(store)) {
    if (!fully_fetched(listing)) continue;
    bool complete = true;
    for (const auto& ref : listing.image_refs) {
      const auto rec = extractions.get(image_key(listing.listing_id, ref.image_id));
      if (!rec || !rec->at("error").get<std::string>().empty()) complete = false;
    }
    if (!complete) todo.push_back(std::move(listing));
  }

  const auto results = extract_from_listings(todo, backends, registry, options);
  for (const auto& listing : results) {
    ++report.listings;
    for (const auto& image : listing.images) {
      ++report.images;
      if (!image.error.empty()) ++report.image_errors;
      Json valid = Json::array();
      std::set<MacAddress> seen;
      for (const auto& c : image.candidates) {
        if (c.oui_valid && seen.insert(c.mac).second) valid.push_back(c.mac.canonical());
      }
      extractions.put(image_key(listing.listing_id, image.image_id),
                      {{"listing_id", listing.listing_id},
                       {"image_id", image.image_id},
                       {"candidate_count", image.candidates.size()},
                       {"ocr_words", ocr_word_count(image.results)},
                       {"valid_macs", valid},
                       {"error", image.error}});
    }
    for (const auto& c : listing.candidates) {
      ++report.candidates;
      if (c.oui_valid) ++report.valid_candidates;
      candidates.put(listing.listing_id + "/" + c.mac.canonical(), Json(c));
    }
  }
  return report;
}

std::vector<ImageResult> image_results(Store& store) {
  std::vector<ImageResult> out;
  store.table(Store::kExtractions).for_each([&](const std::string&, const Json& j) {
    if (!j.at("error").get<std::string>().empty()) return;
    ImageResult r;
    r.image_id = j.at("image_id").get<std::string>();
    r.candidate_count = j.at("candidate_count").get<std::size_t>();
    r.ocr_words = j.at("ocr_words").get<std::size_t>();
    for (const auto& m : j.at("valid_macs")) r.valid_macs.insert(m.get<MacAddress>());
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<MacCandidate> stored_candidates(Store& store) {
  std::vector<MacCandidate> out;
  store.table(Store::kCandidates).for_each([&](const std::string&, const Json& j) { out.push_back(j.get<MacCandidate>()); });
  return out;
}

std::vector<AuctionLink> auction_links(Store& store) {
  const auto listings = listings_by_id(store);
  std::vector<AuctionLink> links;
  for (const auto& c : stored_candidates(store)) {
    if (!c.oui_valid) continue;
    const auto it = listings.find(c.listing_id);
    if (it == listings.end()) continue;
    links.push_back({c.mac, c.listing_id, it->second.listed_at});
  }
  return links;
}

GeolocateStageReport geolocate_stage(Store& store, WpsClient& wps, const std::optional<std::filesystem::path>& history,
                                     Day first_day, int days) {
  GeolocateStageReport report;
  TimelineStore timelines(store.table(Store::kObservations));
  if (history) report.imported = timelines.import_file(*history);

  std::set<MacAddress> distinct;
  for (const auto& link : auction_links(store)) distinct.insert(link.bssid);
  const std::vector<MacAddress> bssids(distinct.begin(), distinct.end());
  report.bssids = bssids.size();
  if (!bssids.empty()) report.poll = schedule_polling(bssids, days, wps, timelines, first_day);
  return report;
}

std::vector<BssidTimeline> stored_timelines(Store& store) {
  TimelineStore timelines(store.table(Store::kObservations));
  const auto links = auction_links(store);
  return assemble_timelines(timelines, links);
}

SoldStageReport sold_stage(Store& store, const std::filesystem::path& pages) {
  SoldStageReport report;
  ListingStore listings(store.table(Store::kListings));
  read_jsonl(pages, [&](const Json& j) {
    ++report.pages;
    auto listing = listings.get(j.at("listing_id").get<std::string>());
    if (!listing) {
      ++report.unmatched;
      return;
    }
    const auto state = detect_sold(j.value("status", 200), j.value("body", std::string{}));
    switch (state) {
      case SoldState::sold: ++report.sold; break;
      case SoldState::not_sold: ++report.not_sold; break;
      case SoldState::unknown: ++report.unknown; break;
    }
    // A page that no longer exists does not erase an earlier verdict.
    if (state == SoldState::unknown || state == listing->sold_state) return;
    listing->sold_state = state;
    listings.update(*listing);
  });
  return report;
}

std::map<std::string, SoldState> sold_states(Store& store) {
  std::map<std::string, SoldState> out;
  for (const auto& l : stored_listings(store)) out[l.listing_id] = l.sold_state;
  return out;
}

}  // namespace mactrace
