#include "mactrace/ingest/images.hpp"

#include <charconv>
#include <fstream>
#include <iterator>

namespace mactrace {

std::string image_url(std::string_view image_id, int size_px, ImageFormat format) {
  if (size_px < kMinImageSizePx || size_px > kMaxImageSizePx) {
    throw BadSize("image size " + std::to_string(size_px) + " outside [32, 2400]");
  }
  std::string url{kImageHost};
  url += "/images/g/";
  url += image_id;
  url += "/s-l";
  url += std::to_string(size_px);
  url += '.';
  url += extension(format);
  return url;
}

std::optional<ParsedImageUrl> parse_image_url(std::string_view url) {
  constexpr std::string_view marker = "/images/g/";
  const auto start = url.find(marker);
  if (start == std::string_view::npos) return std::nullopt;
  auto rest = url.substr(start + marker.size());
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos || slash == 0) return std::nullopt;
  ParsedImageUrl parsed;
  parsed.image_id = std::string(rest.substr(0, slash));
  rest = rest.substr(slash + 1);
  if (rest.substr(0, 3) != "s-l") return std::nullopt;
  rest = rest.substr(3);
  const auto dot = rest.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + dot, parsed.size_px);
  if (ec != std::errc{} || ptr != rest.data() + dot) return std::nullopt;
  try {
    parsed.format = parse_image_format(rest.substr(dot + 1));
  } catch (const InvalidRecord&) {
    return std::nullopt;
  }
  return parsed;
}

std::optional<std::filesystem::path> DirectoryFetcher::resolve(const std::string& url) const {
  auto parsed = parse_image_url(url);
  if (!parsed) return std::nullopt;
  auto path = dir_ / (parsed->image_id + "." + std::string(extension(parsed->format)));
  if (!std::filesystem::is_regular_file(path)) return std::nullopt;
  return path;
}

std::optional<std::size_t> DirectoryFetcher::content_length(const std::string& url) {
  auto path = resolve(url);
  if (!path) return std::nullopt;
  return static_cast<std::size_t>(std::filesystem::file_size(*path));
}

FetchResponse DirectoryFetcher::get(const std::string& url) {
  ++gets_;
  auto path = resolve(url);
  if (!path) return {404, {}};
  std::ifstream in{*path, std::ios::binary};
  return {200, std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}};
}

std::optional<std::size_t> MapFetcher::content_length(const std::string& url) {
  auto it = content_.find(url);
  if (it == content_.end()) return std::nullopt;
  return it->second.size();
}

FetchResponse MapFetcher::get(const std::string& url) {
  ++gets_;
  auto it = content_.find(url);
  if (it == content_.end()) return {404, {}};
  return {200, it->second};
}

std::string image_file_name(const Listing& listing, const ImageRef& image) {
  return listing.listing_id + "_" + image.image_id + "." + std::string(extension(image.format));
}

FetchReport fetch_images(const Listing& listing, ByteFetcher& fetcher,
                         const std::filesystem::path& dir, const FetchOptions& options) {
  std::filesystem::create_directories(dir);
  FetchReport report;
  report.listing = listing;
  const auto now = [&] {
    return options.clock ? options.clock()
                         : std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  };

  for (auto& image : report.listing.image_refs) {
    image.requested_size_px = options.size_px;
    image.format = options.format;
    try {
      const std::string url = image_url(image.image_id, image.requested_size_px, image.format);
      const auto path = dir / image_file_name(listing, image);

      std::error_code ec;
      const auto existing = std::filesystem::file_size(path, ec);
      if (!ec) {
        const auto expected = fetcher.content_length(url);
        if (expected && *expected == existing) {
          image.local_path = path;
          if (!image.fetched_at) image.fetched_at = now();
          ++report.skipped;
          continue;
        }
      }

      const auto response = fetcher.get(url);
      if (response.status != 200) {
        throw FetchError("HTTP " + std::to_string(response.status) + " for " + url);
      }
      const auto tmp = std::filesystem::path(path.string() + ".part");
      {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        out.write(response.body.data(), static_cast<std::streamsize>(response.body.size()));
        if (!out) throw FetchError("cannot write " + tmp.string());
      }
      std::filesystem::rename(tmp, path);
      image.local_path = path;
      image.fetched_at = now();
      ++report.downloaded;
    } catch (const Error& e) {
      report.errors.push_back({image.image_id, e.what()});
    }
  }
  return report;
}

}  // namespace mactrace
