#pragma once

#include <optional>
#include <string_view>

#include "mactrace/core/listing.hpp"

namespace mactrace {

inline constexpr std::string_view kSoldPhrase = "This listing sold";

// nullopt page text means the listing page is gone.
SoldState detect_sold(std::optional<std::string_view> listing_page_text);

// 404/410 map to unknown (the marketplace removes ended listings eventually).
SoldState detect_sold(int http_status, std::string_view body);

}  // namespace mactrace
