#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mactrace/core/error.hpp"

namespace mactrace {

struct GeoPoint {
  double lat = 0;
  double lon = 0;
  bool operator==(const GeoPoint&) const = default;
};

inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(GeoPoint a, GeoPoint b);

class RegionError : public Error {
 public:
  using Error::Error;
};

/// A named simple polygon in (lat, lon), treated as planar. The ring is stored open
/// (a repeated closing vertex is dropped on construction).
struct SensitiveRegion {
  std::string name;
  std::vector<GeoPoint> ring;
};

// Throws RegionError for fewer than 3 distinct vertices or a self-intersecting ring.
SensitiveRegion make_region(std::string name, std::vector<GeoPoint> vertices);

// Ray casting; points on an edge or vertex count as inside.
bool contains(const SensitiveRegion& region, GeoPoint point);

// One record per line: {"name": "...", "ring": [[lat, lon], ...]}
std::vector<SensitiveRegion> load_regions(const std::filesystem::path& path);

}  // namespace mactrace
