#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mactrace/core/error.hpp"

namespace mactrace {

// The backend could not be started, died, or stopped answering.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

// The backend wrote something that is not a valid reply. what() includes the line.
class BackendMalformedReply : public Error {
 public:
  BackendMalformedReply(const std::string& reason, std::string line)
      : Error(reason + ": " + line), line_(std::move(line)) {}
  const std::string& line() const { return line_; }

 private:
  std::string line_;
};

// The backend answered a request with an error record.
class BackendImageError : public Error {
 public:
  using Error::Error;
};

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point&) const = default;
};

struct OcrLine {
  std::string text;
  double confidence = 0;
  std::array<Point, 4> box{};
  bool operator==(const OcrLine&) const = default;
};

struct SegmentResult {
  int segment_index = 0;
  int rotation_deg = 0;
  std::vector<OcrLine> lines;
  bool operator==(const SegmentResult&) const = default;
};

inline const std::vector<int>& all_rotations() {
  static const std::vector<int> rotations{0, 90, 180, 270};
  return rotations;
}

struct OcrRequest {
  std::int64_t id = 0;
  std::string image;  // absolute path
  bool segment = true;
  std::vector<int> rotations = all_rotations();
};

struct OcrReply {
  std::int64_t id = 0;
  std::vector<SegmentResult> segments;
};

struct OcrErrorReply {
  std::int64_t id = 0;
  std::string error;
};

using BackendMessage = std::variant<OcrReply, OcrErrorReply>;

// Single-line JSON renderings; no trailing newline.
std::string encode_request(const OcrRequest& request);
std::string encode_reply(const OcrReply& reply);
std::string encode_error(const OcrErrorReply& error);

// Throws BackendMalformedReply on anything that does not match the reply or error schema.
BackendMessage decode_reply(std::string_view line);
// Throws Error on a malformed request (used by backend implementations).
OcrRequest decode_request(std::string_view line);

}  // namespace mactrace
