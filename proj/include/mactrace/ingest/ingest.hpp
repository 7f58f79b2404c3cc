#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mactrace/ingest/listing_store.hpp"
#include "mactrace/ingest/marketplace.hpp"
#include "mactrace/ingest/quota.hpp"
#include "mactrace/planner/query_planner.hpp"

namespace mactrace {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
};

struct ExecuteOptions {
  std::size_t start_cursor = 0;
  std::size_t workers = 1;
  RetryPolicy retry;
  std::function<void(std::chrono::milliseconds)> sleep;  // default: this_thread::sleep_for
  std::function<Timestamp()> clock;                      // default: system clock
};

struct FailedCall {
  std::size_t index = 0;
  std::string message;
};

struct IngestReport {
  std::int64_t new_listings = 0;
  std::int64_t duplicates = 0;
  std::int64_t listings_returned = 0;
  std::int64_t calls_made = 0;  // quota units consumed, retries included
  std::int64_t probe_calls = 0;
  std::vector<FailedCall> failed;

  IngestReport& operator+=(const IngestReport& other);
};

/// Raised when the daily quota runs out mid-plan. Calls before `cursor` have completed;
/// re-running with start_cursor = cursor resumes the plan.
class QuotaExhausted : public Error {
 public:
  QuotaExhausted(std::size_t cursor, IngestReport report);
  std::size_t cursor() const { return cursor_; }
  const IngestReport& report() const { return report_; }

 private:
  std::size_t cursor_;
  IngestReport report_;
};

IngestReport execute_plan(const QueryPlan& plan, MarketplaceClient& client, Quota& quota,
                          ListingStore& store, const ExecuteOptions& options = {});

// Probe (one quota unit), pack the brand filter, then execute the page calls.
struct ExhaustiveResult {
  QueryPlan plan;
  std::vector<std::string> non_exhaustive;
  IngestReport report;
};
ExhaustiveResult exhaustive_query(const std::string& query_text, MarketplaceClient& client,
                                  Quota& quota, ListingStore& store,
                                  std::int64_t cap = kDefaultResultsCap,
                                  int page_size = kDefaultPageSize,
                                  const ExecuteOptions& options = {});

// Newly-listed pagination down to the newest stored listing.
struct IncrementalResult {
  int calls = 0;
  IngestReport report;
};
IncrementalResult incremental_query(const std::string& query_text, MarketplaceClient& client,
                                    Quota& quota, ListingStore& store,
                                    int page_size = kDefaultPageSize,
                                    const ExecuteOptions& options = {});

}  // namespace mactrace
