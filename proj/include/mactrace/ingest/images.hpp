#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mactrace/core/listing.hpp"

namespace mactrace {

class BadSize : public Error {
 public:
  using Error::Error;
};

class FetchError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::string_view kImageHost = "https://i.ebayimg.com";

// "https://i.ebayimg.com/images/g/<image_id>/s-l<size_px>.<ext>"
std::string image_url(std::string_view image_id, int size_px, ImageFormat format);

struct ParsedImageUrl {
  std::string image_id;
  int size_px = 0;
  ImageFormat format = ImageFormat::jpeg;
};
std::optional<ParsedImageUrl> parse_image_url(std::string_view url);

struct FetchResponse {
  int status = 0;
  std::string body;
};

class ByteFetcher {
 public:
  virtual ~ByteFetcher() = default;
  // Size the server reports for `url`, when it reports one.
  virtual std::optional<std::size_t> content_length(const std::string& url) = 0;
  virtual FetchResponse get(const std::string& url) = 0;
};

// Serves images from a directory laid out as <dir>/<image_id>.<ext>; missing files are 404.
class DirectoryFetcher : public ByteFetcher {
 public:
  explicit DirectoryFetcher(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::optional<std::size_t> content_length(const std::string& url) override;
  FetchResponse get(const std::string& url) override;
  int gets() const { return gets_; }

 private:
  std::optional<std::filesystem::path> resolve(const std::string& url) const;
  std::filesystem::path dir_;
  int gets_ = 0;
};

// URL -> bytes; anything else is 404.
class MapFetcher : public ByteFetcher {
 public:
  explicit MapFetcher(std::map<std::string, std::string> content) : content_(std::move(content)) {}
  std::optional<std::size_t> content_length(const std::string& url) override;
  FetchResponse get(const std::string& url) override;
  int gets() const { return gets_; }

 private:
  std::map<std::string, std::string> content_;
  int gets_ = 0;
};

struct FetchOptions {
  int size_px = 1600;
  ImageFormat format = ImageFormat::jpeg;
  std::function<Timestamp()> clock;
};

struct ImageFetchError {
  std::string image_id;
  std::string message;
};

struct FetchReport {
  Listing listing;  // image_refs updated with local_path / fetched_at
  int downloaded = 0;
  int skipped = 0;
  std::vector<ImageFetchError> errors;
};

// "<listing_id>_<image_id>.<ext>"
std::string image_file_name(const Listing& listing, const ImageRef& image);

/// Downloads every image of `listing` into `dir`. A file already on disk whose size equals
/// the server's content length is not downloaded again. Failures are reported per image.
FetchReport fetch_images(const Listing& listing, ByteFetcher& fetcher,
                         const std::filesystem::path& dir, const FetchOptions& options = {});

}  // namespace mactrace
