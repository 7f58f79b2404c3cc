#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mactrace/core/listing.hpp"
#include "mactrace/core/oui_registry.hpp"
#include "mactrace/extraction/ocr_backend.hpp"

namespace mactrace {

// Lowercase and drop every byte that is not an ASCII letter or digit.
std::string normalize_text(std::string_view text);

struct TextMatch {
  MacAddress mac;
  std::string raw_match;
};

/// Every address-shaped substring of `text`:
///  - raw forms: six hex pairs joined by one consistent separator (':', '-', ' ', '.'), or 12
///    bare hex digits, with no ASCII letter or digit directly before or after;
///  - the normalized form: a maximal run of exactly 12 hex digits in normalize_text(text).
/// Raw forms come first, then normalized ones; each in text order. No deduplication.
std::vector<TextMatch> scan_text(std::string_view text);

// Line texts of one (segment, rotation) result joined with '\n'.
std::string joined_text(const SegmentResult& result);

/// Candidates from one image's OCR results. The same address seen again in another segment,
/// rotation or scan keeps the provenance of its first sighting.
std::vector<MacCandidate> extract_candidates(std::span<const SegmentResult> results,
                                             const OuiRegistry& registry,
                                             std::string_view listing_id = {},
                                             std::string_view image_id = {});

// Whitespace-separated words, summed over segments, taking the best rotation.
std::size_t ocr_word_count(std::span<const SegmentResult> results);

struct ImageExtraction {
  std::string image_id;
  std::vector<SegmentResult> results;
  std::vector<MacCandidate> candidates;  // per image, before listing-level dedup
  std::string error;                     // empty on success
};

struct ListingExtraction {
  std::string listing_id;
  std::vector<MacCandidate> candidates;  // deduplicated by address across the listing's images
  std::vector<ImageExtraction> images;
  std::size_t error_count() const;
};

// Images without a local_path count as errors. Backend failures are recorded per image.
ListingExtraction extract_from_listing(const Listing& listing, OcrBackend& backend,
                                       const OuiRegistry& registry, const RunOptions& options = {});

// Runs listings across `backends` (one worker per backend). Output order follows input order.
std::vector<ListingExtraction> extract_from_listings(std::span<const Listing> listings,
                                                     std::span<OcrBackend* const> backends,
                                                     const OuiRegistry& registry,
                                                     const RunOptions& options = {});

}  // namespace mactrace
