#include "mactrace/core/listing.hpp"

#include <algorithm>
#include <cctype>

namespace mactrace {

namespace {

std::string fold(std::string_view text) {
  std::string out;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

}  // namespace

Condition parse_condition(std::string_view text) {
  using Kind = Condition::Kind;
  const std::string key = fold(text);
  if (key == "new" || key == "brandnew" || key == "newitem") return {Kind::new_item, {}};
  if (key == "openbox" || key == "newopenbox" || key == "newother" || key == "openboxed") {
    return {Kind::open_box, {}};
  }
  if (key == "used" || key == "preowned") return {Kind::used, {}};
  if (key.rfind("refurbished", 0) == 0 || key.find("refurbished") != std::string::npos) {
    return {Kind::refurbished, {}};
  }
  if (key.rfind("forparts", 0) == 0) return {Kind::for_parts, {}};
  return {Kind::other, std::string(text)};
}

std::string to_string(const Condition& condition) {
  using Kind = Condition::Kind;
  switch (condition.kind) {
    case Kind::new_item: return "new";
    case Kind::open_box: return "open_box";
    case Kind::used: return "used";
    case Kind::refurbished: return "refurbished";
    case Kind::for_parts: return "for_parts";
    case Kind::other: return condition.other_text.empty() ? "other" : condition.other_text;
  }
  return "other";
}

void validate(const Listing& listing) {
  if (listing.listing_id.empty()) throw InvalidRecord("listing without listing_id");
  const auto& prefix = listing.seller_location.postal_prefix;
  if (listing.seller_location.country == "US" && !prefix.empty()) {
    const bool digits = std::all_of(prefix.begin(), prefix.end(),
                                    [](char c) { return c >= '0' && c <= '9'; });
    if (prefix.size() != 3 || !digits) {
      throw InvalidRecord("listing " + listing.listing_id +
                          ": US postal prefix must be 3 digits, got \"" + prefix + "\"");
    }
  }
  for (const auto& image : listing.image_refs) {
    if (image.image_id.empty()) throw InvalidRecord("listing " + listing.listing_id + ": empty image_id");
    if (image.requested_size_px < kMinImageSizePx || image.requested_size_px > kMaxImageSizePx) {
      throw InvalidRecord("listing " + listing.listing_id + ": image size out of range");
    }
  }
}

std::string_view to_string(ImageFormat format) {
  switch (format) {
    case ImageFormat::jpeg: return "jpeg";
    case ImageFormat::png: return "png";
    case ImageFormat::webp: return "webp";
  }
  return "jpeg";
}

ImageFormat parse_image_format(std::string_view text) {
  if (text == "jpeg" || text == "jpg") return ImageFormat::jpeg;
  if (text == "png") return ImageFormat::png;
  if (text == "webp") return ImageFormat::webp;
  throw InvalidRecord("unknown image format: " + std::string(text));
}

std::string_view extension(ImageFormat format) {
  switch (format) {
    case ImageFormat::jpeg: return "jpg";
    case ImageFormat::png: return "png";
    case ImageFormat::webp: return "webp";
  }
  return "jpg";
}

std::string_view to_string(SoldState state) {
  switch (state) {
    case SoldState::sold: return "sold";
    case SoldState::not_sold: return "not_sold";
    case SoldState::unknown: return "unknown";
  }
  return "unknown";
}

SoldState parse_sold_state(std::string_view text) {
  if (text == "sold") return SoldState::sold;
  if (text == "not_sold") return SoldState::not_sold;
  if (text == "unknown") return SoldState::unknown;
  throw InvalidRecord("unknown sold state: " + std::string(text));
}

}  // namespace mactrace
