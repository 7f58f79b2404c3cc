#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "mactrace/core/mac_address.hpp"
#include "mactrace/core/time.hpp"

namespace mactrace {

// Transient; the poller retries on its next cycle.
class WpsUnavailable : public Error {
 public:
  using Error::Error;
};

// What the positioning service reported for one BSSID.
struct WpsReply {
  double lat = 0;
  double lon = 0;
  std::optional<double> accuracy_m;
};

inline constexpr double kNotFoundSentinel = -180.0;

inline bool is_not_found(const WpsReply& reply) {
  return reply.lat == kNotFoundSentinel && reply.lon == kNotFoundSentinel;
}

class WpsClient {
 public:
  virtual ~WpsClient() = default;
  // `now` lets simulated clients answer as of a point in time; live clients ignore it.
  virtual WpsReply query(const MacAddress& bssid, Timestamp now) = 0;
};

/// Deterministic positioning service: each BSSID is visible at a location during
/// availability windows; outside every window the reply is the (-180,-180) sentinel.
///
/// Config file, one record per line:
///   {"bssid": "...", "windows": [{"from": ts, "until": ts, "lat": x, "lon": y, "accuracy_m": a}]}
class FixtureWps : public WpsClient {
 public:
  struct Window {
    Timestamp from;
    Timestamp until;  // exclusive
    double lat = 0;
    double lon = 0;
    std::optional<double> accuracy_m;
  };

  FixtureWps() = default;
  explicit FixtureWps(const std::filesystem::path& config);

  void add_window(const MacAddress& bssid, Window window);
  // Queries for these BSSIDs raise WpsUnavailable.
  void set_unreachable(std::set<MacAddress> bssids);
  void set_offline(bool offline) { offline_ = offline; }

  WpsReply query(const MacAddress& bssid, Timestamp now) override;
  std::size_t queries() const;

 private:
  std::map<MacAddress, std::vector<Window>> windows_;
  std::set<MacAddress> unreachable_;
  bool offline_ = false;
  std::size_t queries_ = 0;
  mutable std::mutex mutex_;
};

/// Replays recorded replies: {"bssid", "day": "YYYY-MM-DD", "lat", "lon", "accuracy_m"}.
/// Days without a record answer with the sentinel.
class ReplayWps : public WpsClient {
 public:
  explicit ReplayWps(const std::filesystem::path& path);
  WpsReply query(const MacAddress& bssid, Timestamp now) override;

 private:
  std::map<std::pair<MacAddress, Day>, WpsReply> replies_;
};

}  // namespace mactrace
