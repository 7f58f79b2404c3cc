#include "mactrace/geolocate/wps.hpp"

#include "mactrace/core/json.hpp"

namespace mactrace {

namespace {

std::optional<double> optional_number(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

FixtureWps::FixtureWps(const std::filesystem::path& path) {
  read_jsonl(path, [&](const Json& j) {
    const auto bssid = j.at("bssid").get<MacAddress>();
    for (const auto& w : j.at("windows")) {
      add_window(bssid, {timestamp_from_json(w.at("from")), timestamp_from_json(w.at("until")),
                             w.at("lat").get<double>(), w.at("lon").get<double>(),
                             optional_number(w, "accuracy_m")});
    }
  });
}

void FixtureWps::add_window(const MacAddress& bssid, Window window) {
  std::lock_guard lock{mutex_};
  windows_[bssid].push_back(window);
}

void FixtureWps::set_unreachable(std::set<MacAddress> bssids) {
  std::lock_guard lock{mutex_};
  unreachable_ = std::move(bssids);
}

std::size_t FixtureWps::queries() const {
  std::lock_guard lock{mutex_};
  return queries_;
}

WpsReply FixtureWps::query(const MacAddress& bssid, Timestamp now) {
  std::lock_guard lock{mutex_};
  ++queries_;
  if (offline_ || unreachable_.count(bssid) != 0) throw WpsUnavailable("positioning service unreachable");
  if (auto it = windows_.find(bssid); it != windows_.end()) {
    for (const auto& w : it->second) {
      if (now >= w.from && now < w.until) return {w.lat, w.lon, w.accuracy_m};
    }
  }
  return {kNotFoundSentinel, kNotFoundSentinel, std::nullopt};
}

ReplayWps::ReplayWps(const std::filesystem::path& path) {
  read_jsonl(path, [&](const Json& j) {
    const auto bssid = j.at("bssid").get<MacAddress>();
    const auto day = utc_day(parse_timestamp(j.at("day").get<std::string>()));
    replies_[{bssid, day}] = {j.at("lat").get<double>(), j.at("lon").get<double>(),
                              optional_number(j, "accuracy_m")};
  });
}

WpsReply ReplayWps::query(const MacAddress& bssid, Timestamp now) {
  if (auto it = replies_.find({bssid, utc_day(now)}); it != replies_.end()) return it->second;
  return {kNotFoundSentinel, kNotFoundSentinel, std::nullopt};
}

}  // namespace mactrace
