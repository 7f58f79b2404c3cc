#include "mactrace/ingest/ingest.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

namespace mactrace {

IngestReport& IngestReport::operator+=(const IngestReport& other) {
  new_listings += other.new_listings;
  duplicates += other.duplicates;
  listings_returned += other.listings_returned;
  calls_made += other.calls_made;
  probe_calls += other.probe_calls;
  failed.insert(failed.end(), other.failed.begin(), other.failed.end());
  return *this;
}

QuotaExhausted::QuotaExhausted(std::size_t cursor, IngestReport report)
    : Error("daily API quota exhausted; resume at call " + std::to_string(cursor)),
      cursor_(cursor),
      report_(std::move(report)) {}

namespace {

constexpr std::size_t kNoCursor = std::numeric_limits<std::size_t>::max();

Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

// Hands out plan indices in order, charging one quota unit per call under the same lock, so
// every index below the first refused one has been paid for.
class Dispatcher {
 public:
  Dispatcher(const QueryPlan& plan, Quota& quota, const ExecuteOptions& options)
      : plan_(plan), quota_(quota), options_(options), next_(options.start_cursor) {}

  std::optional<std::size_t> claim() {
    std::lock_guard lock{mutex_};
    if (exhausted_ || next_ >= plan_.calls.size()) return std::nullopt;
    if (!quota_.try_consume(now())) {
      exhausted_ = true;
      suspend_locked(next_);
      return std::nullopt;
    }
    ++report_.calls_made;
    return next_++;
  }

  // A retry attempt for an already-claimed call.
  bool charge_retry(std::size_t index) {
    std::lock_guard lock{mutex_};
    if (!exhausted_ && quota_.try_consume(now())) {
      ++report_.calls_made;
      return true;
    }
    exhausted_ = true;
    suspend_locked(index);
    return false;
  }

  void merge(const IngestReport& partial) {
    std::lock_guard lock{mutex_};
    const auto calls = report_.calls_made;
    report_ += partial;
    report_.calls_made = calls;
  }

  IngestReport report() const {
    std::lock_guard lock{mutex_};
    auto r = report_;
    std::sort(r.failed.begin(), r.failed.end(),
              [](const FailedCall& a, const FailedCall& b) { return a.index < b.index; });
    return r;
  }
  std::size_t cursor() const {
    std::lock_guard lock{mutex_};
    return cursor_;
  }

 private:
  Timestamp now() const { return options_.clock ? options_.clock() : system_now(); }
  void suspend_locked(std::size_t index) { cursor_ = std::min(cursor_, index); }

  const QueryPlan& plan_;
  Quota& quota_;
  const ExecuteOptions& options_;
  std::size_t next_;
  bool exhausted_ = false;
  std::size_t cursor_ = kNoCursor;
  IngestReport report_;
  mutable std::mutex mutex_;
};

enum class Outcome { done, failed, suspended };

Outcome run_call(std::size_t index, const QueryCall& call, MarketplaceClient& client,
                 ListingStore& store, Dispatcher& dispatcher, const ExecuteOptions& options,
                 IngestReport& report) {
  auto backoff = options.retry.initial_backoff;
  const int attempts = std::max(1, options.retry.attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      if (call.kind == QueryCall::Kind::probe) {
        client.probe(call);
        ++report.probe_calls;
        return Outcome::done;
      }
      const auto page = client.search(call);
      for (const auto& listing : page.listings) {
        ++report.listings_returned;
        if (store.upsert(listing)) {
          ++report.new_listings;
        } else {
          ++report.duplicates;
        }
      }
      return Outcome::done;
    } catch (const ClientError& e) {
      if (attempt >= attempts) {
        report.failed.push_back({index, e.what()});
        return Outcome::failed;
      }
      if (options.sleep) {
        options.sleep(backoff);
      } else {
        std::this_thread::sleep_for(backoff);
      }
      backoff *= 2;
      if (!dispatcher.charge_retry(index)) return Outcome::suspended;
    }
  }
}

}  // namespace

IngestReport execute_plan(const QueryPlan& plan, MarketplaceClient& client, Quota& quota,
                          ListingStore& store, const ExecuteOptions& options) {
  Dispatcher dispatcher{plan, quota, options};
  auto worker = [&] {
    IngestReport local;
    while (auto index = dispatcher.claim()) {
      if (run_call(*index, plan.calls[*index], client, store, dispatcher, options, local) ==
          Outcome::suspended) {
        break;
      }
    }
    dispatcher.merge(local);
  };

  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  const auto cursor = dispatcher.cursor();
  if (cursor != kNoCursor) throw QuotaExhausted(cursor, dispatcher.report());
  return dispatcher.report();
}

ExhaustiveResult exhaustive_query(const std::string& query_text, MarketplaceClient& client,
                                  Quota& quota, ListingStore& store, std::int64_t cap,
                                  int page_size, const ExecuteOptions& options) {
  const Timestamp now = options.clock ? options.clock() : system_now();
  if (!quota.try_consume(now)) throw QuotaExhausted(0, {});
  QueryCall probe_call;
  probe_call.kind = QueryCall::Kind::probe;
  probe_call.query_text = query_text;
  probe_call.page_size = 1;
  const auto probe = client.probe(probe_call);

  const auto packed = pack_filters(probe.brands, cap);
  ExhaustiveResult result;
  result.plan = build_exhaustive_plan(query_text, packed.groups, cap, page_size);
  result.non_exhaustive = packed.non_exhaustive;

  auto run_options = options;
  run_options.start_cursor = std::max<std::size_t>(1, options.start_cursor);  // probe already issued
  result.report = execute_plan(result.plan, client, quota, store, run_options);
  result.report.calls_made += 1;
  result.report.probe_calls += 1;
  return result;
}

IncrementalResult incremental_query(const std::string& query_text, MarketplaceClient& client,
                                    Quota& quota, ListingStore& store, int page_size,
                                    const ExecuteOptions& options) {
  const Timestamp horizon = store.latest_listed_at().value_or(Timestamp{});
  auto pager = build_incremental_plan(query_text, horizon, page_size);
  IncrementalResult result;
  while (auto call = pager.next_call()) {
    const Timestamp now = options.clock ? options.clock() : system_now();
    if (!quota.try_consume(now)) throw QuotaExhausted(static_cast<std::size_t>(result.calls), result.report);
    ++result.calls;
    ++result.report.calls_made;
    const auto page = client.search(*call);
    for (const auto& listing : pager.accept(page.listings)) {
      ++result.report.listings_returned;
      if (store.upsert(listing)) {
        ++result.report.new_listings;
      } else {
        ++result.report.duplicates;
      }
    }
  }
  return result;
}

}  // namespace mactrace
