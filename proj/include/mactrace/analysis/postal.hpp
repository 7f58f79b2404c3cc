#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mactrace/analysis/geo.hpp"

namespace mactrace {

class ResolverError : public Error {
 public:
  using Error::Error;
};

struct ResolvedPostal {
  std::string country;  // ISO-3166 alpha-2
  std::string postal_code;
};

// Reverse geocoding to a postal code.
class PostalResolver {
 public:
  virtual ~PostalResolver() = default;
  virtual std::optional<ResolvedPostal> resolve(GeoPoint point) = 0;
};

/// Nearest entry of a fixed table, if within `radius_km`.
/// Table file, one record per line: {"lat", "lon", "country", "postal_code"}.
class TablePostalResolver : public PostalResolver {
 public:
  struct Entry {
    GeoPoint point;
    ResolvedPostal postal;
  };

  explicit TablePostalResolver(std::vector<Entry> entries, double radius_km = 10.0);
  static TablePostalResolver load(const std::filesystem::path& path, double radius_km = 10.0);

  std::optional<ResolvedPostal> resolve(GeoPoint point) override;

 private:
  std::vector<Entry> entries_;
  double radius_km_;
};

// UK outward code: the text before the first space, uppercased.
std::string outward_code(std::string_view postal_code);

}  // namespace mactrace
