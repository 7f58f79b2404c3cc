#include "mactrace/analysis/postal.hpp"

#include <cctype>
#include <limits>

#include "mactrace/core/json.hpp"

namespace mactrace {

TablePostalResolver::TablePostalResolver(std::vector<Entry> entries, double radius_km)
    : entries_(std::move(entries)), radius_km_(radius_km) {}

TablePostalResolver TablePostalResolver::load(const std::filesystem::path& path, double radius_km) {
  std::vector<Entry> entries;
  read_jsonl(path, [&](const Json& j) {
    entries.push_back({{j.at("lat").get<double>(), j.at("lon").get<double>()},
                       {j.at("country").get<std::string>(), j.at("postal_code").get<std::string>()}});
  });
  return TablePostalResolver(std::move(entries), radius_km);
}

std::optional<ResolvedPostal> TablePostalResolver::resolve(GeoPoint point) {
  const Entry* best = nullptr;
  double best_km = std::numeric_limits<double>::infinity();
  for (const auto& entry : entries_) {
    const double d = haversine_km(point, entry.point);
    if (d < best_km) {
      best_km = d;
      best = &entry;
    }
  }
  if (!best || best_km > radius_km_) return std::nullopt;
  return best->postal;
}

std::string outward_code(std::string_view postal_code) {
  const auto first = postal_code.find_first_not_of(' ');
  if (first == std::string_view::npos) return {};
  postal_code.remove_prefix(first);
  std::string out{postal_code.substr(0, postal_code.find(' '))};
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace mactrace
