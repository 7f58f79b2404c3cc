#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "mactrace/core/json.hpp"
#include "mactrace/planner/query_planner.hpp"

namespace mactrace {

// Transient failure talking to a marketplace; eligible for retry.
class ClientError : public Error {
 public:
  using Error::Error;
};

struct ProbeResponse {
  std::int64_t total = 0;
  std::vector<FilterOption> brands;
};

struct SearchPage {
  std::int64_t total = 0;
  std::vector<Listing> listings;
};

/// Search API surface needed by the planner and the ingester. Implementations must be safe
/// to call from several threads.
class MarketplaceClient {
 public:
  virtual ~MarketplaceClient() = default;
  virtual ProbeResponse probe(const QueryCall& call) = 0;
  virtual SearchPage search(const QueryCall& call) = 0;
};

// Wire schema shared by the fixture files and the record/replay adapter:
//   probe:  {"total": n, "refinements": {"brand": [{"name": s, "count": n}, ...]}}
//   search: {"total": n, "items": [<listing>, ...]}
Json probe_to_json(const ProbeResponse& response);
ProbeResponse probe_from_json(const Json& j);
Json page_to_json(const SearchPage& page);
SearchPage page_from_json(const Json& j);
Json call_to_json(const QueryCall& call);

/// Deterministic in-memory marketplace with a hard results cap per (query, filters).
///
/// A query of the form "BRAND (...) -(...)" matches listings of that brand (case-insensitive);
/// any other query text matches every listing. "best_match" order is a fixed hash of the
/// listing id; "newly_listed" is listed_at descending.
class FixtureMarketplace : public MarketplaceClient {
 public:
  struct Item {
    Listing listing;
    std::string brand;
  };

  explicit FixtureMarketplace(std::vector<Item> items, std::int64_t results_cap = kDefaultResultsCap);

  // One record per line: a listing object with an extra "brand" member.
  static FixtureMarketplace load(const std::filesystem::path& path,
                                 std::int64_t results_cap = kDefaultResultsCap);

  ProbeResponse probe(const QueryCall& call) override;
  SearchPage search(const QueryCall& call) override;

  std::int64_t calls() const { return calls_.load(); }
  // Makes the given 1-based call numbers throw ClientError (retry testing).
  void fail_calls(std::set<std::int64_t> call_numbers);
  // Adds a listing at runtime (new arrivals between runs).
  void add(Item item);

  const std::vector<Item>& items() const { return items_; }

 private:
  std::vector<const Item*> matching(const QueryCall& call) const;
  void count_call();

  std::vector<Item> items_;
  std::int64_t cap_;
  std::atomic<std::int64_t> calls_{0};
  std::set<std::int64_t> failing_;
  mutable std::mutex mutex_;
};

/// Forwards to another client and appends every request/response pair to a JSONL file.
class RecordingClient : public MarketplaceClient {
 public:
  RecordingClient(MarketplaceClient& inner, const std::filesystem::path& path);

  ProbeResponse probe(const QueryCall& call) override;
  SearchPage search(const QueryCall& call) override;

 private:
  void record(const QueryCall& call, const Json& response);

  MarketplaceClient& inner_;
  std::ofstream out_;
  std::mutex mutex_;
};

/// Serves responses recorded by RecordingClient. Unknown requests raise ClientError.
class ReplayClient : public MarketplaceClient {
 public:
  explicit ReplayClient(const std::filesystem::path& path);

  ProbeResponse probe(const QueryCall& call) override;
  SearchPage search(const QueryCall& call) override;

 private:
  const Json& lookup(const QueryCall& call) const;

  std::map<std::string, Json> responses_;
};

}  // namespace mactrace
