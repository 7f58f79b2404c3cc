#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mactrace/core/mac_address.hpp"

namespace mactrace {

class RegistryParse : public Error {
 public:
  using Error::Error;
};

enum class RegistryFormat { ieee_csv, line_pairs };

/// IEEE MA-L assignments: 24-bit prefix -> organization name.
///
/// Immutable after load. Lookups are pure and may be issued from any thread.
class OuiRegistry {
 public:
  OuiRegistry() = default;

  bool contains(Oui prefix) const { return entries_.count(prefix) != 0; }
  // Case-insensitive; accepts the forms understood by parse_oui.
  bool contains(std::string_view prefix_text) const;
  std::optional<std::string_view> organization(Oui prefix) const;

  std::size_t size() const { return entries_.size(); }
  // Later records that repeated an already-seen prefix.
  std::size_t duplicate_count() const { return duplicates_; }
  std::size_t skipped_count() const { return skipped_; }

  // Sorted by prefix.
  std::vector<Oui> prefixes() const;

  // Copy keeping only the prefixes for which `keep` returns true.
  template <typename Pred>
  OuiRegistry filtered(Pred keep) const {
    OuiRegistry out;
    for (const auto& [prefix, name] : entries_) {
      if (keep(prefix)) out.entries_.emplace(prefix, name);
    }
    return out;
  }

  // Returns false (and counts a duplicate) if the prefix is already present.
  bool insert(Oui prefix, std::string organization);

 private:
  friend OuiRegistry load_oui_registry(std::istream&, RegistryFormat);

  std::unordered_map<Oui, std::string> entries_;
  std::size_t duplicates_ = 0;
  std::size_t skipped_ = 0;
};

OuiRegistry load_oui_registry(std::istream& source, RegistryFormat format);
OuiRegistry load_oui_registry(const std::filesystem::path& path, RegistryFormat format);
// ".csv" selects ieee_csv, anything else line_pairs.
OuiRegistry load_oui_registry(const std::filesystem::path& path);

}  // namespace mactrace
