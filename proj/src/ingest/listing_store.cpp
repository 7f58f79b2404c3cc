#include "mactrace/ingest/listing_store.hpp"

#include "mactrace/core/json.hpp"

namespace mactrace {

bool ListingStore::upsert(const Listing& listing) {
  validate(listing);
  return table_.insert_if_absent(listing.listing_id, Json(listing));
}

void ListingStore::update(const Listing& listing) {
  validate(listing);
  table_.put(listing.listing_id, Json(listing));
}

std::optional<Listing> ListingStore::get(const std::string& listing_id) const {
  auto j = table_.get(listing_id);
  if (!j) return std::nullopt;
  return j->get<Listing>();
}

std::vector<Listing> ListingStore::all() const {
  std::vector<Listing> out;
  table_.for_each([&](const std::string&, const Json& value) { out.push_back(value.get<Listing>()); });
  return out;
}

std::optional<Timestamp> ListingStore::latest_listed_at() const {
  std::optional<Timestamp> latest;
  table_.for_each([&](const std::string&, const Json& value) {
    const auto ts = timestamp_from_json(value.at("listed_at"));
    if (!latest || ts > *latest) latest = ts;
  });
  return latest;
}

}  // namespace mactrace
