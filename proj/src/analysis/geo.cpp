#include "mactrace/analysis/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "mactrace/core/json.hpp"

namespace mactrace {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kEdgeEpsilon = 1e-12;

// Planar coordinates: x = lon, y = lat.
double cross(GeoPoint o, GeoPoint a, GeoPoint b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool on_segment(GeoPoint p, GeoPoint a, GeoPoint b) {
  const double scale = std::max({1.0, std::abs(a.lat), std::abs(a.lon), std::abs(b.lat), std::abs(b.lon)});
  if (std::abs(cross(a, b, p)) > kEdgeEpsilon * scale * scale) return false;
  return p.lon >= std::min(a.lon, b.lon) - kEdgeEpsilon && p.lon <= std::max(a.lon, b.lon) + kEdgeEpsilon &&
         p.lat >= std::min(a.lat, b.lat) - kEdgeEpsilon && p.lat <= std::max(a.lat, b.lat) + kEdgeEpsilon;
}

int sign(double v) { return (v > 0) - (v < 0); }

bool segments_intersect(GeoPoint p1, GeoPoint p2, GeoPoint q1, GeoPoint q2) {
  const int d1 = sign(cross(q1, q2, p1));
  const int d2 = sign(cross(q1, q2, p2));
  const int d3 = sign(cross(p1, p2, q1));
  const int d4 = sign(cross(p1, p2, q2));
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return true;
  return (d1 == 0 && on_segment(p1, q1, q2)) || (d2 == 0 && on_segment(p2, q1, q2)) ||
         (d3 == 0 && on_segment(q1, p1, p2)) || (d4 == 0 && on_segment(q2, p1, p2));
}

}  // namespace

double haversine_km(GeoPoint a, GeoPoint b) {
  // Great-circle angle in atan2 form, stable for both tiny and antipodal separations.
  if (std::tie(b.lat, b.lon) < std::tie(a.lat, a.lon)) std::swap(a, b);
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double y1 = std::cos(lat2) * std::sin(dlon);
  const double y2 = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  const double x = std::sin(lat1) * std::sin(lat2) + std::cos(lat1) * std::cos(lat2) * std::cos(dlon);
  return kEarthRadiusKm * std::atan2(std::hypot(y1, y2), x);
}

SensitiveRegion make_region(std::string name, std::vector<GeoPoint> vertices) {
  std::vector<GeoPoint> ring;
  for (const auto& v : vertices) {
    if (!std::isfinite(v.lat) || !std::isfinite(v.lon)) throw RegionError(name + ": non-finite vertex");
    if (ring.empty() || !(ring.back() == v)) ring.push_back(v);
  }
  while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw RegionError(name + ": a region needs at least 3 vertices");

  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) {
        throw RegionError(name + ": ring is self-intersecting");
      }
    }
  }
  return {std::move(name), std::move(ring)};
}

bool contains(const SensitiveRegion& region, GeoPoint p) {
  const auto& ring = region.ring;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, ring[i], ring[(i + 1) % n])) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<SensitiveRegion> load_regions(const std::filesystem::path& path) {
  std::vector<SensitiveRegion> regions;
  read_jsonl(path, [&](const Json& j) {
    std::vector<GeoPoint> vertices;
    for (const auto& v : j.at("ring")) vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    regions.push_back(make_region(j.at("name").get<std::string>(), std::move(vertices)));
  });
  return regions;
}

}  // namespace mactrace
