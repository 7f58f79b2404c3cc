#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mactrace/core/listing.hpp"
#include "mactrace/core/time.hpp"

namespace mactrace {

inline constexpr std::int64_t kDefaultResultsCap = 10'000;
inline constexpr int kDefaultPageSize = 200;
inline constexpr int kMaxPageSize = 200;

class PlanError : public Error {
 public:
  using Error::Error;
};

struct FilterOption {
  std::string name;
  std::int64_t estimated_count = 0;
};

// A set of mutually exclusive filter options queried together under one results cap.
struct FilterGroup {
  std::vector<std::string> options;
  std::int64_t estimated_count = 0;

  // Options joined with '|', used to name the group in reports.
  std::string label() const;
};

struct PackResult {
  std::vector<FilterGroup> groups;
  // Labels of singleton groups whose own count exceeds the cap.
  std::vector<std::string> non_exhaustive;
};

// First-fit decreasing. Ties in count keep input order. Throws PlanError on cap <= 0 or a
// repeated option name.
PackResult pack_filters(std::span<const FilterOption> options, std::int64_t cap);

enum class SortOrder { best_match, newly_listed };

struct QueryCall {
  enum class Kind { probe, page };

  Kind kind = Kind::page;
  std::string query_text;
  std::vector<std::string> filter_group;
  SortOrder sort = SortOrder::best_match;
  std::int64_t page_offset = 0;
  int page_size = kDefaultPageSize;

  bool operator==(const QueryCall&) const = default;
};

struct QueryPlan {
  std::vector<QueryCall> calls;
  std::int64_t estimated_cost = 0;
  std::vector<std::string> non_exhaustive_groups;

  void append(const QueryPlan& other);
};

// One probe call followed by ceil(min(group count, cap) / page_size) page calls per group.
// The last page of a group is shortened so that offset + size never passes the cap.
QueryPlan build_exhaustive_plan(std::string_view query_text, std::span<const FilterGroup> groups,
                                std::int64_t cap, int page_size = kDefaultPageSize);

/// Consumer-driven pagination over a newest-first sort that stops at the first listing
/// already covered by the store (listed_at <= last stored timestamp).
///
/// Usage: while (auto call = pager.next_call()) { auto fresh = pager.accept(fetch(*call)); }
class IncrementalPager {
 public:
  IncrementalPager(std::string query_text, Timestamp last_stored_ts,
                   int page_size = kDefaultPageSize, std::int64_t cap = kDefaultResultsCap);

  // Next call to issue, or nullopt once pagination has halted.
  std::optional<QueryCall> next_call() const;

  // Feeds the page returned for the last call; returns the listings newer than the
  // stored horizon, in page order.
  std::vector<Listing> accept(std::span<const Listing> page);

  bool halted() const { return halted_; }
  int calls_issued() const { return calls_issued_; }

 private:
  std::string query_text_;
  Timestamp horizon_;
  int page_size_;
  std::int64_t cap_;
  std::int64_t offset_ = 0;
  int calls_issued_ = 0;
  bool halted_ = false;
};

IncrementalPager build_incremental_plan(std::string query_text, Timestamp last_stored_ts,
                                        int page_size = kDefaultPageSize,
                                        std::int64_t cap = kDefaultResultsCap);

struct MarketplaceConfig {
  std::string marketplace_id = "EBAY_US";
  // Translated forms of the general queries; empty means the English defaults.
  std::vector<std::string> general_queries;
  // Brand-specific queries are only issued where the advanced syntax was tuned (English sites).
  bool brand_queries = true;
};

inline const std::vector<std::string>& default_general_queries() {
  static const std::vector<std::string> queries{"wifi router", "wifi access point"};
  return queries;
}
inline const std::vector<std::string>& brand_inclusion_terms() {
  static const std::vector<std::string> terms{"ap",   "access point", "router", "radio",
                                              "wifi", "wireless",     "mesh"};
  return terms;
}
inline const std::vector<std::string>& brand_exclusion_terms() {
  static const std::vector<std::string> terms{"car", "carplay", "mouse", "phone", "gb"};
  return terms;
}

// "BRAND (t1,t2,...) -(e1,e2,...)"
std::string brand_query(std::string_view brand);

std::vector<std::string> build_query_texts(const MarketplaceConfig& marketplace,
                                           std::span<const std::string> brands);

std::string_view to_string(SortOrder sort);
SortOrder parse_sort_order(std::string_view text);

// One JSON record per call.
void write_plan(std::ostream& out, const QueryPlan& plan);
QueryPlan read_plan(std::istream& in);

}  // namespace mactrace
