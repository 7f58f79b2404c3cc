#include "mactrace/core/json.hpp"

#include <fstream>

namespace mactrace {

void to_json(Json& j, const MacAddress& mac) { j = mac.canonical(); }

void from_json(const Json& j, MacAddress& mac) { mac = parse_mac(j.get<std::string>()); }

Json timestamp_json(Timestamp ts) { return format_timestamp(ts); }

Timestamp timestamp_from_json(const Json& j) { return parse_timestamp(j.get<std::string>()); }

void to_json(Json& j, const ImageRef& ref) {
  j = Json{{"image_id", ref.image_id},
           {"requested_size_px", ref.requested_size_px},
           {"format", to_string(ref.format)}};
  j["local_path"] = ref.local_path ? Json(ref.local_path->string()) : Json(nullptr);
  j["fetched_at"] = ref.fetched_at ? timestamp_json(*ref.fetched_at) : Json(nullptr);
}

void from_json(const Json& j, ImageRef& ref) {
  ref.image_id = j.at("image_id").get<std::string>();
  ref.requested_size_px = j.value("requested_size_px", 1600);
  ref.format = parse_image_format(j.value("format", std::string("jpeg")));
  ref.local_path.reset();
  ref.fetched_at.reset();
  if (auto it = j.find("local_path"); it != j.end() && !it->is_null()) {
    ref.local_path = it->get<std::string>();
  }
  if (auto it = j.find("fetched_at"); it != j.end() && !it->is_null()) {
    ref.fetched_at = timestamp_from_json(*it);
  }
}

void to_json(Json& j, const Listing& listing) {
  j = Json{{"listing_id", listing.listing_id},
           {"marketplace_id", listing.marketplace_id},
           {"title", listing.title},
           {"condition", to_string(listing.condition)},
           {"seller_location",
            {{"country", listing.seller_location.country},
             {"city", listing.seller_location.city},
             {"postal_prefix", listing.seller_location.postal_prefix}}},
           {"listed_at", timestamp_json(listing.listed_at)},
           {"image_refs", listing.image_refs},
           {"sold_state", to_string(listing.sold_state)}};
}

void from_json(const Json& j, Listing& listing) {
  listing.listing_id = j.at("listing_id").get<std::string>();
  listing.marketplace_id = j.value("marketplace_id", std::string{});
  listing.title = j.value("title", std::string{});
  listing.condition = parse_condition(j.value("condition", std::string{}));
  listing.seller_location = {};
  if (auto it = j.find("seller_location"); it != j.end() && it->is_object()) {
    listing.seller_location.country = it->value("country", std::string{});
    listing.seller_location.city = it->value("city", std::string{});
    listing.seller_location.postal_prefix = it->value("postal_prefix", std::string{});
  }
  listing.listed_at = timestamp_from_json(j.at("listed_at"));
  listing.image_refs = j.value("image_refs", std::vector<ImageRef>{});
  listing.sold_state = parse_sold_state(j.value("sold_state", std::string("unknown")));
}

void to_json(Json& j, const MacCandidate& c) {
  j = Json{{"mac", c.mac},
           {"raw_match", c.raw_match},
           {"listing_id", c.listing_id},
           {"image_id", c.image_id},
           {"segment_index", c.segment_index ? Json(*c.segment_index) : Json(nullptr)},
           {"rotation_deg", c.rotation_deg},
           {"oui_valid", c.oui_valid}};
}

void from_json(const Json& j, MacCandidate& c) {
  c.mac = j.at("mac").get<MacAddress>();
  c.raw_match = j.value("raw_match", std::string{});
  c.listing_id = j.value("listing_id", std::string{});
  c.image_id = j.value("image_id", std::string{});
  c.segment_index.reset();
  if (auto it = j.find("segment_index"); it != j.end() && !it->is_null()) {
    c.segment_index = it->get<int>();
  }
  c.rotation_deg = j.value("rotation_deg", 0);
  c.oui_valid = j.value("oui_valid", false);
}

void read_jsonl(std::istream& in, const std::function<void(const Json&)>& on_record,
                bool tolerate_torn_tail) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      if (tolerate_torn_tail && in.eof()) return;
      throw JsonlError("line " + std::to_string(line_no) + ": " + e.what());
    }
    on_record(record);
  }
}

void read_jsonl(const std::filesystem::path& path, const std::function<void(const Json&)>& on_record,
                bool tolerate_torn_tail) {
  std::ifstream in{path};
  if (!in) throw JsonlError("cannot open " + path.string());
  try {
    read_jsonl(in, on_record, tolerate_torn_tail);
  } catch (const JsonlError& e) {
    throw JsonlError(path.string() + ": " + e.what());
  }
}

}  // namespace mactrace
