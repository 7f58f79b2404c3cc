#include "mactrace/ingest/sold.hpp"

namespace mactrace {

SoldState detect_sold(std::optional<std::string_view> listing_page_text) {
  if (!listing_page_text) return SoldState::unknown;
  return listing_page_text->find(kSoldPhrase) != std::string_view::npos ? SoldState::sold
                                                                        : SoldState::not_sold;
}

SoldState detect_sold(int http_status, std::string_view body) {
  if (http_status == 404 || http_status == 410) return SoldState::unknown;
  if (http_status < 200 || http_status >= 300) return SoldState::unknown;
  return detect_sold(std::optional<std::string_view>{body});
}

}  // namespace mactrace
