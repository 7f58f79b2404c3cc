#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mactrace/core/listing.hpp"
#include "mactrace/store/journal.hpp"

namespace mactrace {

// Listings keyed by listing_id, shared across marketplaces.
class ListingStore {
 public:
  explicit ListingStore(JournalTable& table) : table_(table) {}

  // Stores the listing unless its id is already present. Returns true when new.
  bool upsert(const Listing& listing);
  // Replaces the stored record (image fetch results, sold state).
  void update(const Listing& listing);

  std::optional<Listing> get(const std::string& listing_id) const;
  std::vector<Listing> all() const;
  std::size_t size() const { return table_.size(); }
  std::optional<Timestamp> latest_listed_at() const;

  std::string export_text() const { return table_.snapshot_text(); }

 private:
  JournalTable& table_;
};

}  // namespace mactrace
