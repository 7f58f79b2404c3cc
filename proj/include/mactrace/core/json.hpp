#pragma once

// JSON mappings for the core record types. Kept out of the other headers so that only
// translation units doing serialization pay for nlohmann/json.

#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mactrace/core/listing.hpp"
#include "mactrace/core/mac_address.hpp"
#include "mactrace/core/time.hpp"

namespace mactrace {

using Json = nlohmann::json;

void to_json(Json& j, const MacAddress& mac);
void from_json(const Json& j, MacAddress& mac);
void to_json(Json& j, const ImageRef& ref);
void from_json(const Json& j, ImageRef& ref);
void to_json(Json& j, const Listing& listing);
void from_json(const Json& j, Listing& listing);
void to_json(Json& j, const MacCandidate& candidate);
void from_json(const Json& j, MacCandidate& candidate);

Json timestamp_json(Timestamp ts);
Timestamp timestamp_from_json(const Json& j);

class JsonlError : public Error {
 public:
  using Error::Error;
};

// Calls `on_record` for every non-blank line. Throws JsonlError naming the line number on
// a parse failure, unless `tolerate_torn_tail` is set and the bad line is the final one
// without a trailing newline (an interrupted append).
void read_jsonl(std::istream& in, const std::function<void(const Json&)>& on_record,
                bool tolerate_torn_tail = false);
void read_jsonl(const std::filesystem::path& path, const std::function<void(const Json&)>& on_record,
                bool tolerate_torn_tail = false);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
  std::vector<T> out;
  read_jsonl(path, [&](const Json& j) { out.push_back(j.get<T>()); });
  return out;
}

inline void write_jsonl_line(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

}  // namespace mactrace
