#include "mactrace/ingest/marketplace.hpp"

#include <algorithm>
#include <cctype>

namespace mactrace {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Brand named by an advanced "BRAND (...) -(...)" query, or empty for a plain query.
std::string advanced_query_brand(std::string_view query) {
  const auto paren = query.find(" (");
  if (paren == std::string_view::npos || query.find(") -(") == std::string_view::npos) return {};
  return lower(query.substr(0, paren));
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Json probe_to_json(const ProbeResponse& response) {
  Json brands = Json::array();
  for (const auto& option : response.brands) {
    brands.push_back({{"name", option.name}, {"count", option.estimated_count}});
  }
  return Json{{"total", response.total}, {"refinements", {{"brand", brands}}}};
}

ProbeResponse probe_from_json(const Json& j) {
  ProbeResponse response;
  response.total = j.at("total").get<std::int64_t>();
  for (const auto& b : j.at("refinements").at("brand")) {
    response.brands.push_back({b.at("name").get<std::string>(), b.at("count").get<std::int64_t>()});
  }
  return response;
}

Json page_to_json(const SearchPage& page) {
  return Json{{"total", page.total}, {"items", page.listings}};
}

SearchPage page_from_json(const Json& j) {
  SearchPage page;
  page.total = j.at("total").get<std::int64_t>();
  page.listings = j.at("items").get<std::vector<Listing>>();
  return page;
}

Json call_to_json(const QueryCall& call) {
  return Json{{"kind", call.kind == QueryCall::Kind::probe ? "probe" : "page"},
              {"query_text", call.query_text},
              {"filter_group", call.filter_group},
              {"sort", to_string(call.sort)},
              {"page_offset", call.page_offset},
              {"page_size", call.page_size}};
}

FixtureMarketplace::FixtureMarketplace(std::vector<Item> items, std::int64_t results_cap)
    : items_(std::move(items)), cap_(results_cap) {}

FixtureMarketplace FixtureMarketplace::load(const std::filesystem::path& path,
                                            std::int64_t results_cap) {
  std::vector<Item> items;
  read_jsonl(path, [&](const Json& j) {
    items.push_back({j.get<Listing>(), j.value("brand", std::string{})});
  });
  return FixtureMarketplace(std::move(items), results_cap);
}

void FixtureMarketplace::fail_calls(std::set<std::int64_t> call_numbers) {
  std::lock_guard lock{mutex_};
  failing_ = std::move(call_numbers);
}

void FixtureMarketplace::add(Item item) {
  std::lock_guard lock{mutex_};
  items_.push_back(std::move(item));
}

void FixtureMarketplace::count_call() {
  const auto n = ++calls_;
  std::lock_guard lock{mutex_};
  if (failing_.count(n) != 0) throw ClientError("injected failure on call " + std::to_string(n));
}

std::vector<const FixtureMarketplace::Item*> FixtureMarketplace::matching(const QueryCall& call) const {
  const std::string brand = advanced_query_brand(call.query_text);
  std::vector<std::string> filters;
  for (const auto& f : call.filter_group) filters.push_back(lower(f));

  std::vector<const Item*> out;
  std::lock_guard lock{mutex_};
  for (const auto& item : items_) {
    const std::string item_brand = lower(item.brand);
    if (!brand.empty() && item_brand != brand) continue;
    if (!filters.empty() && std::find(filters.begin(), filters.end(), item_brand) == filters.end()) {
      continue;
    }
    out.push_back(&item);
  }
  if (call.sort == SortOrder::newly_listed) {
    std::sort(out.begin(), out.end(), [](const Item* a, const Item* b) {
      if (a->listing.listed_at != b->listing.listed_at) return a->listing.listed_at > b->listing.listed_at;
      return a->listing.listing_id < b->listing.listing_id;
    });
  } else {
    std::sort(out.begin(), out.end(), [](const Item* a, const Item* b) {
      const auto ha = fnv1a(a->listing.listing_id);
      const auto hb = fnv1a(b->listing.listing_id);
      if (ha != hb) return ha < hb;
      return a->listing.listing_id < b->listing.listing_id;
    });
  }
  return out;
}

ProbeResponse FixtureMarketplace::probe(const QueryCall& call) {
  count_call();
  const auto items = matching(call);
  std::map<std::string, std::int64_t> counts;
  for (const auto* item : items) ++counts[item->brand];
  ProbeResponse response;
  response.total = static_cast<std::int64_t>(items.size());
  for (const auto& [name, count] : counts) response.brands.push_back({name, count});
  return response;
}

SearchPage FixtureMarketplace::search(const QueryCall& call) {
  count_call();
  const auto items = matching(call);
  SearchPage page;
  page.total = static_cast<std::int64_t>(items.size());
  const std::int64_t visible = std::min<std::int64_t>(page.total, cap_);
  const std::int64_t end = std::min<std::int64_t>(visible, call.page_offset + call.page_size);
  for (std::int64_t i = call.page_offset; i < end; ++i) {
    page.listings.push_back(items[static_cast<std::size_t>(i)]->listing);
  }
  return page;
}

RecordingClient::RecordingClient(MarketplaceClient& inner, const std::filesystem::path& path)
    : inner_(inner), out_(path, std::ios::app) {
  if (!out_) throw ClientError("cannot open recording file " + path.string());
}

void RecordingClient::record(const QueryCall& call, const Json& response) {
  std::lock_guard lock{mutex_};
  write_jsonl_line(out_, Json{{"request", call_to_json(call)}, {"response", response}});
  out_.flush();
}

ProbeResponse RecordingClient::probe(const QueryCall& call) {
  auto response = inner_.probe(call);
  record(call, probe_to_json(response));
  return response;
}

SearchPage RecordingClient::search(const QueryCall& call) {
  auto page = inner_.search(call);
  record(call, page_to_json(page));
  return page;
}

ReplayClient::ReplayClient(const std::filesystem::path& path) {
  read_jsonl(path, [&](const Json& j) {
    responses_.emplace(j.at("request").dump(), j.at("response"));
  });
}

const Json& ReplayClient::lookup(const QueryCall& call) const {
  auto it = responses_.find(call_to_json(call).dump());
  if (it == responses_.end()) throw ClientError("no recorded response for " + call_to_json(call).dump());
  return it->second;
}

ProbeResponse ReplayClient::probe(const QueryCall& call) { return probe_from_json(lookup(call)); }

SearchPage ReplayClient::search(const QueryCall& call) { return page_from_json(lookup(call)); }

}  // namespace mactrace
