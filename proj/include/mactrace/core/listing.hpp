#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mactrace/core/mac_address.hpp"
#include "mactrace/core/time.hpp"

namespace mactrace {

class InvalidRecord : public Error {
 public:
  using Error::Error;
};

enum class ImageFormat { jpeg, png, webp };

inline constexpr int kMinImageSizePx = 32;
inline constexpr int kMaxImageSizePx = 2400;

struct ImageRef {
  std::string image_id;
  int requested_size_px = 1600;
  ImageFormat format = ImageFormat::jpeg;
  std::optional<std::filesystem::path> local_path;
  std::optional<Timestamp> fetched_at;

  bool operator==(const ImageRef&) const = default;
};

struct Condition {
  enum class Kind { new_item, open_box, used, refurbished, for_parts, other };
  Kind kind = Kind::other;
  std::string other_text;  // only meaningful for Kind::other

  bool operator==(const Condition&) const = default;
};

// Maps marketplace condition strings ("New", "Open box", "Used", "For parts or not working"...)
// onto the enum; anything unrecognized is kept verbatim as Kind::other.
Condition parse_condition(std::string_view text);
std::string to_string(const Condition& condition);

struct SellerLocation {
  std::string country;  // ISO-3166 alpha-2
  std::string city;
  std::string postal_prefix;

  bool operator==(const SellerLocation&) const = default;
};

enum class SoldState { sold, not_sold, unknown };

struct Listing {
  std::string listing_id;
  std::string marketplace_id;
  std::string title;
  Condition condition;
  SellerLocation seller_location;
  Timestamp listed_at{};
  std::vector<ImageRef> image_refs;
  SoldState sold_state = SoldState::unknown;

  bool operator==(const Listing&) const = default;
};

// Throws InvalidRecord on a broken invariant (empty id, bad US postal prefix, image size).
void validate(const Listing& listing);

struct MacCandidate {
  MacAddress mac;
  std::string raw_match;
  std::string listing_id;
  std::string image_id;
  std::optional<int> segment_index;
  int rotation_deg = 0;
  bool oui_valid = false;

  bool operator==(const MacCandidate&) const = default;
};

std::string_view to_string(ImageFormat format);
ImageFormat parse_image_format(std::string_view text);
// File extension used in image URLs and file names ("jpg", "png", "webp").
std::string_view extension(ImageFormat format);

std::string_view to_string(SoldState state);
SoldState parse_sold_state(std::string_view text);

}  // namespace mactrace
