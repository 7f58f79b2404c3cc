#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mactrace/core/oui_registry.hpp"
#include "mactrace/extraction/ocr_backend.hpp"
#include "mactrace/geolocate/timeline.hpp"
#include "mactrace/ingest/images.hpp"
#include "mactrace/store/journal.hpp"
#include "mactrace/validation/validation.hpp"

namespace mactrace {

// Glue between the stages: each reads its inputs from the store and writes its outputs back,
// keyed by natural ids so that re-running a stage after a crash converges.

std::vector<Listing> stored_listings(Store& store);
std::map<std::string, Listing> listings_by_id(Store& store);

struct FetchStageReport {
  std::size_t listings = 0;
  std::size_t downloaded = 0;
  std::size_t skipped = 0;
  std::vector<std::string> errors;  // "<listing_id>/<image_id>: message"
};

FetchStageReport fetch_stage(Store& store, ByteFetcher& fetcher, const std::filesystem::path& images_dir,
                             const FetchOptions& options = {});

struct ExtractStageReport {
  std::size_t listings = 0;  // processed this run
  std::size_t images = 0;
  std::size_t image_errors = 0;
  std::size_t candidates = 0;
  std::size_t valid_candidates = 0;
};

/// Runs OCR extraction for listings whose images are all fetched and which have no complete
/// extraction record yet. Writes the "extractions" table (one record per image: candidate
/// count, OCR word count, registered addresses, error) and the "candidates" table (one record
/// per listing and address).
ExtractStageReport extract_stage(Store& store, std::span<OcrBackend* const> backends, const OuiRegistry& registry,
                                 const RunOptions& options = {});

// Per-image pipeline results for the validation harness; images that failed are left out.
std::vector<ImageResult> image_results(Store& store);
std::vector<MacCandidate> stored_candidates(Store& store);

// One link per registered candidate address, timed at its listing's listed_at.
std::vector<AuctionLink> auction_links(Store& store);

struct GeolocateStageReport {
  std::size_t bssids = 0;
  std::size_t imported = 0;
  PollReport poll;
};

/// Imports prior observations when given, then polls every linked address once per day for
/// `days` days starting at `first_day`.
GeolocateStageReport geolocate_stage(Store& store, WpsClient& wps, const std::optional<std::filesystem::path>& history,
                                     Day first_day, int days);

std::vector<BssidTimeline> stored_timelines(Store& store);

struct SoldStageReport {
  std::size_t pages = 0;
  std::size_t sold = 0;
  std::size_t not_sold = 0;
  std::size_t unknown = 0;
  std::size_t unmatched = 0;  // pages for listings not in the store
};

// Pages file, one record per line: {"listing_id", "status", "body"}.
SoldStageReport sold_stage(Store& store, const std::filesystem::path& pages);

std::map<std::string, SoldState> sold_states(Store& store);

}  // namespace mactrace
