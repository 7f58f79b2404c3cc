#include "mactrace/extraction/extract.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace mactrace {

namespace {

bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_mac_separator(char c) { return c == ':' || c == '-' || c == ' ' || c == '.'; }

bool alnum_at(std::string_view s, std::size_t i) { return i < s.size() && is_ascii_alnum(s[i]); }

std::size_t hex_run(std::string_view s, std::size_t from) {
  std::size_t end = from;
  while (end < s.size() && is_hex_digit(s[end])) ++end;
  return end - from;
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (is_ascii_alnum(c)) out.push_back(ascii_lower(c));
  }
  return out;
}

std::vector<TextMatch> scan_text(std::string_view text) {
  std::vector<TextMatch> out;

  // Raw forms, anchored at a hex digit with no letter or digit before it.
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_hex_digit(text[i]) || (i > 0 && is_ascii_alnum(text[i - 1]))) continue;
    const std::size_t run = hex_run(text, i);
    if (run == 12 && !alnum_at(text, i + 12)) {
      const auto raw = text.substr(i, 12);
      out.push_back({parse_mac(raw), std::string(raw)});
    } else if (run == 2 && i + 17 <= text.size() && is_mac_separator(text[i + 2]) && !alnum_at(text, i + 17)) {
      const auto raw = text.substr(i, 17);
      if (auto mac = try_parse_mac(raw)) out.push_back({*mac, std::string(raw)});
    }
    i += run - 1;
  }

  // Normalized form: maximal 12-digit hex runs after dropping non-alphanumerics.
  std::string normalized;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_ascii_alnum(text[i])) continue;
    normalized.push_back(ascii_lower(text[i]));
    origin.push_back(i);
  }
  for (std::size_t k = 0; k < normalized.size();) {
    if (!is_hex_digit(normalized[k])) {
      ++k;
      continue;
    }
    const std::size_t run = hex_run(normalized, k);
    if (run == 12) {
      const auto first = origin[k];
      const auto last = origin[k + 11];
      out.push_back({parse_mac(std::string_view(normalized).substr(k, 12)),
                     std::string(text.substr(first, last - first + 1))});
    }
    k += run;
  }
  return out;
}

std::string joined_text(const SegmentResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.lines.size(); ++i) {
    if (i != 0) out.push_back('\n');
    out += result.lines[i].text;
  }
  return out;
}

std::vector<MacCandidate> extract_candidates(std::span<const SegmentResult> results,
                                             const OuiRegistry& registry, std::string_view listing_id,
                                             std::string_view image_id) {
  std::vector<MacCandidate> out;
  std::unordered_set<MacAddress> seen;
  for (const auto& result : results) {
    for (auto& match : scan_text(joined_text(result))) {
      if (!seen.insert(match.mac).second) continue;
      MacCandidate candidate;
      candidate.mac = match.mac;
      candidate.raw_match = std::move(match.raw_match);
      candidate.listing_id = std::string(listing_id);
      candidate.image_id = std::string(image_id);
      candidate.segment_index = result.segment_index;
      candidate.rotation_deg = result.rotation_deg;
      candidate.oui_valid = registry.contains(match.mac.oui());
      out.push_back(std::move(candidate));
    }
  }
  return out;
}

std::size_t ocr_word_count(std::span<const SegmentResult> results) {
  std::map<int, std::size_t> per_rotation;
  for (const auto& result : results) {
    auto& count = per_rotation[result.rotation_deg];
    for (const auto& line : result.lines) {
      std::istringstream words{line.text};
      std::string word;
      while (words >> word) ++count;
    }
  }
  std::size_t best = 0;
  for (const auto& [rotation, count] : per_rotation) best = std::max(best, count);
  return best;
}

std::size_t ListingExtraction::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(images.begin(), images.end(), [](const ImageExtraction& i) { return !i.error.empty(); }));
}

ListingExtraction extract_from_listing(const Listing& listing, OcrBackend& backend,
                                       const OuiRegistry& registry, const RunOptions& options) {
  ListingExtraction out;
  out.listing_id = listing.listing_id;
  std::unordered_set<MacAddress> seen;
  for (const auto& image : listing.image_refs) {
    ImageExtraction extraction;
    extraction.image_id = image.image_id;
    if (!image.local_path) {
      extraction.error = "image not fetched";
    } else {
      try {
        extraction.results = backend.run(*image.local_path, options);
        extraction.candidates = extract_candidates(extraction.results, registry, listing.listing_id, image.image_id);
      } catch (const Error& e) {
        extraction.error = e.what();
      }
    }
    for (const auto& candidate : extraction.candidates) {
      if (seen.insert(candidate.mac).second) out.candidates.push_back(candidate);
    }
    out.images.push_back(std::move(extraction));
  }
  return out;
}

std::vector<ListingExtraction> extract_from_listings(std::span<const Listing> listings,
                                                     std::span<OcrBackend* const> backends,
                                                     const OuiRegistry& registry, const RunOptions& options) {
  std::vector<ListingExtraction> out(listings.size());
  if (backends.empty()) throw Error("no OCR backends supplied");
  std::atomic<std::size_t> next{0};
  auto worker = [&](OcrBackend* backend) {
    for (std::size_t i = next++; i < listings.size(); i = next++) {
      out[i] = extract_from_listing(listings[i], *backend, registry, options);
    }
  };
  if (backends.size() == 1) {
    worker(backends.front());
  } else {
    std::vector<std::jthread> pool;
    for (auto* backend : backends) pool.emplace_back(worker, backend);
  }
  return out;
}

}  // namespace mactrace
