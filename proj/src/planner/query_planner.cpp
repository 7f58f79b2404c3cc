#include "mactrace/planner/query_planner.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "mactrace/core/json.hpp"

namespace mactrace {

std::string FilterGroup::label() const {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i != 0) out.push_back('|');
    out += options[i];
  }
  return out;
}

PackResult pack_filters(std::span<const FilterOption> options, std::int64_t cap) {
  if (cap <= 0) throw PlanError("results cap must be positive");
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& option : options) {
      if (option.estimated_count < 0) throw PlanError("negative count for option " + option.name);
      if (!seen.insert(option.name).second) throw PlanError("duplicate filter option " + option.name);
    }
  }

  std::vector<std::size_t> order(options.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return options[a].estimated_count > options[b].estimated_count;
  });

  PackResult result;
  for (std::size_t index : order) {
    const auto& option = options[index];
    if (option.estimated_count > cap) {
      result.groups.push_back({{option.name}, option.estimated_count});
      result.non_exhaustive.push_back(option.name);
      continue;
    }
    auto fits = std::find_if(result.groups.begin(), result.groups.end(), [&](const FilterGroup& g) {
      return g.estimated_count + option.estimated_count <= cap;
    });
    if (fits == result.groups.end()) {
      result.groups.push_back({{option.name}, option.estimated_count});
    } else {
      fits->options.push_back(option.name);
      fits->estimated_count += option.estimated_count;
    }
  }
  return result;
}

void QueryPlan::append(const QueryPlan& other) {
  calls.insert(calls.end(), other.calls.begin(), other.calls.end());
  estimated_cost += other.estimated_cost;
  non_exhaustive_groups.insert(non_exhaustive_groups.end(), other.non_exhaustive_groups.begin(),
                               other.non_exhaustive_groups.end());
}

QueryPlan build_exhaustive_plan(std::string_view query_text, std::span<const FilterGroup> groups,
                                std::int64_t cap, int page_size) {
  if (page_size < 1 || page_size > kMaxPageSize) throw PlanError("page_size must be in [1, 200]");
  if (cap < page_size) throw PlanError("results cap must be at least page_size");

  QueryPlan plan;
  QueryCall probe;
  probe.kind = QueryCall::Kind::probe;
  probe.query_text = std::string(query_text);
  probe.page_size = 1;
  plan.calls.push_back(probe);

  for (const auto& group : groups) {
    if (group.estimated_count > cap) plan.non_exhaustive_groups.push_back(group.label());
    const std::int64_t reachable = std::min(group.estimated_count, cap);
    for (std::int64_t offset = 0; offset < reachable; offset += page_size) {
      QueryCall call;
      call.query_text = std::string(query_text);
      call.filter_group = group.options;
      call.page_offset = offset;
      call.page_size = static_cast<int>(std::min<std::int64_t>(page_size, cap - offset));
      plan.calls.push_back(std::move(call));
    }
  }
  plan.estimated_cost = static_cast<std::int64_t>(plan.calls.size());
  return plan;
}

IncrementalPager::IncrementalPager(std::string query_text, Timestamp last_stored_ts, int page_size,
                                   std::int64_t cap)
    : query_text_(std::move(query_text)), horizon_(last_stored_ts), page_size_(page_size), cap_(cap) {
  if (page_size < 1 || page_size > kMaxPageSize) throw PlanError("page_size must be in [1, 200]");
  if (cap < 1) throw PlanError("results cap must be positive");
}

std::optional<QueryCall> IncrementalPager::next_call() const {
  if (halted_ || offset_ >= cap_) return std::nullopt;
  QueryCall call;
  call.query_text = query_text_;
  call.sort = SortOrder::newly_listed;
  call.page_offset = offset_;
  call.page_size = static_cast<int>(std::min<std::int64_t>(page_size_, cap_ - offset_));
  return call;
}

std::vector<Listing> IncrementalPager::accept(std::span<const Listing> page) {
  auto call = next_call();
  if (!call) return {};
  ++calls_issued_;
  std::vector<Listing> fresh;
  for (const auto& listing : page) {
    if (listing.listed_at <= horizon_) {
      halted_ = true;
      break;
    }
    fresh.push_back(listing);
  }
  offset_ += call->page_size;
  if (static_cast<int>(page.size()) < call->page_size || offset_ >= cap_) halted_ = true;
  return fresh;
}

IncrementalPager build_incremental_plan(std::string query_text, Timestamp last_stored_ts,
                                        int page_size, std::int64_t cap) {
  return IncrementalPager(std::move(query_text), last_stored_ts, page_size, cap);
}

std::string brand_query(std::string_view brand) {
  auto join = [](const std::vector<std::string>& terms) {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i != 0) out.push_back(',');
      out += terms[i];
    }
    return out;
  };
  return std::string(brand) + " (" + join(brand_inclusion_terms()) + ") -(" +
         join(brand_exclusion_terms()) + ")";
}

std::vector<std::string> build_query_texts(const MarketplaceConfig& marketplace,
                                           std::span<const std::string> brands) {
  std::vector<std::string> out = marketplace.general_queries.empty() ? default_general_queries()
                                                                     : marketplace.general_queries;
  if (marketplace.brand_queries) {
    for (const auto& brand : brands) out.push_back(brand_query(brand));
  }
  return out;
}

std::string_view to_string(SortOrder sort) {
  return sort == SortOrder::newly_listed ? "newly_listed" : "best_match";
}

SortOrder parse_sort_order(std::string_view text) {
  if (text == "best_match") return SortOrder::best_match;
  if (text == "newly_listed") return SortOrder::newly_listed;
  throw PlanError("unknown sort order: " + std::string(text));
}

void write_plan(std::ostream& out, const QueryPlan& plan) {
  write_jsonl_line(out, Json{{"type", "plan"},
                             {"estimated_cost", plan.estimated_cost},
                             {"non_exhaustive_groups", plan.non_exhaustive_groups}});
  for (const auto& call : plan.calls) {
    write_jsonl_line(out, Json{{"type", call.kind == QueryCall::Kind::probe ? "probe" : "page"},
                               {"query_text", call.query_text},
                               {"filter_group", call.filter_group},
                               {"sort", to_string(call.sort)},
                               {"page_offset", call.page_offset},
                               {"page_size", call.page_size}});
  }
}

QueryPlan read_plan(std::istream& in) {
  QueryPlan plan;
  bool header = false;
  read_jsonl(in, [&](const Json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "plan") {
      header = true;
      plan.non_exhaustive_groups = j.value("non_exhaustive_groups", std::vector<std::string>{});
      return;
    }
    QueryCall call;
    if (type == "probe") {
      call.kind = QueryCall::Kind::probe;
    } else if (type != "page") {
      throw PlanError("unknown plan record type: " + type);
    }
    call.query_text = j.at("query_text").get<std::string>();
    call.filter_group = j.value("filter_group", std::vector<std::string>{});
    call.sort = parse_sort_order(j.value("sort", std::string("best_match")));
    call.page_offset = j.at("page_offset").get<std::int64_t>();
    call.page_size = j.at("page_size").get<int>();
    if (call.page_size < 1 || call.page_size > kMaxPageSize || call.page_offset < 0) {
      throw PlanError("plan call out of range");
    }
    plan.calls.push_back(std::move(call));
  });
  if (!header) throw PlanError("plan file has no header record");
  plan.estimated_cost = static_cast<std::int64_t>(plan.calls.size());
  return plan;
}

}  // namespace mactrace
