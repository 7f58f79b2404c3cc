#pragma once

// Reference implementations written independently of the library, used to cross-check it.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mactrace/analysis/bands.hpp"
#include "mactrace/core/random.hpp"
#include "mactrace/validation/validation.hpp"

namespace mactrace::test {

struct OracleMatch {
  std::string canonical;  // 12 lowercase hex digits
  std::string raw;
  bool operator==(const OracleMatch&) const = default;
};

// Tests every substring of `text`. Raw forms first, in order of start position, then the
// normalized form, in order of position within the normalized text.
std::vector<OracleMatch> brute_force_scan(std::string_view text);

// Canonical addresses found by brute_force_scan, as a set.
std::set<std::string> brute_force_addresses(std::string_view text);

// Random noisy text with addresses embedded in every separator style, some glued to
// neighbouring letters or digits, some inside longer hex runs.
std::string random_mac_text(Rng& rng);

// Prefixes listed in a "<hex6> <organization>" file, parsed by hand.
std::set<std::uint32_t> scan_line_pairs(std::string_view text);

// Planar polygon as (x, y) = (lon, lat) vertices, open ring.
using Ring = std::vector<std::pair<double, double>>;

int winding_number(const Ring& ring, double x, double y);
bool on_boundary(const Ring& ring, double x, double y, double eps = 1e-12);
bool inside_by_winding(const Ring& ring, double x, double y);

// Star-shaped, hence simple, polygon around (cx, cy).
Ring random_star_polygon(Rng& rng, double cx, double cy, double r_min, double r_max, int vertices);

// Central angle from the dot product of unit vectors, times 6371 km.
double vector_distance_km(double lat1, double lon1, double lat2, double lon2);

// One OUI, three models whose addresses sit in interleaved fourth-byte layers.
std::vector<LabeledMac> banded_fixture(std::uint64_t seed, std::size_t per_model);

// Twenty images with hand-derived expected tallies (see the .cpp for the per-image trace).
struct ConstructedValidationSet {
  std::vector<ImageResult> results;
  std::vector<WorkItem> worklist;
  std::vector<AnnotationRecord> annotations;
  std::array<ConfusionCounts, kPartitionCount> expected_counts;
  std::array<std::size_t, kPartitionCount> expected_inconclusive;
  std::array<std::size_t, kPartitionCount> expected_annotated;
  std::size_t expected_missing = 0;
};
ConstructedValidationSet constructed_validation_set();

}  // namespace mactrace::test
