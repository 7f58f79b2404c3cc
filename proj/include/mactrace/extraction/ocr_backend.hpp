#pragma once

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mactrace/extraction/ocr_protocol.hpp"

namespace mactrace {

struct RunOptions {
  bool segment = true;
  std::vector<int> rotations = all_rotations();
};

/// Segmentation + OCR over one image. Implementations are safe to call concurrently.
class OcrBackend {
 public:
  virtual ~OcrBackend() = default;
  virtual std::vector<SegmentResult> run(const std::filesystem::path& image, const RunOptions& options) = 0;
};

/// Speaks the line protocol to a child process over its stdin/stdout.
///
/// Requests may be pipelined through run_many(); replies are matched by id and may arrive in
/// any order. Calls on one instance are serialized.
class ProcessBackend : public OcrBackend {
 public:
  // argv[0] is resolved through PATH. Throws BackendUnavailable if the process cannot start.
  explicit ProcessBackend(std::vector<std::string> argv,
                          std::chrono::milliseconds reply_timeout = std::chrono::minutes{5});
  ~ProcessBackend() override;

  ProcessBackend(const ProcessBackend&) = delete;
  ProcessBackend& operator=(const ProcessBackend&) = delete;

  std::vector<SegmentResult> run(const std::filesystem::path& image, const RunOptions& options) override;

  struct BatchItem {
    std::filesystem::path image;
    RunOptions options;
  };
  // One entry per input, in input order. An error reply for one image is returned as an
  // exception_ptr in that slot rather than failing the batch.
  struct BatchResult {
    std::vector<SegmentResult> segments;
    std::exception_ptr error;
  };
  std::vector<BatchResult> run_many(const std::vector<BatchItem>& items, std::size_t max_in_flight = 16);

 private:
  void write_line(const std::string& line);
  std::string read_line();
  void shutdown();

  std::vector<std::string> argv_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::int64_t next_id_ = 1;
  std::mutex mutex_;
};

/// Canned OCR output keyed by image file name, mirroring what a segmentation + OCR engine
/// would report. Shared by the in-process FixtureBackend and the fixture backend executable.
///
/// Fixture file, one record per line:
///   {"image": "<file name>", "segments": [["line", ...], ...], "readable_rotation": 0}
/// Text is only legible at readable_rotation; other rotations yield no lines. Unknown images
/// behave like blank photos.
class FixtureOcrEngine {
 public:
  struct Entry {
    std::vector<std::vector<std::string>> segments;
    int readable_rotation = 0;
  };

  FixtureOcrEngine() = default;
  explicit FixtureOcrEngine(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}
  static FixtureOcrEngine load(const std::filesystem::path& path);

  void add(std::string image_name, Entry entry) { entries_[std::move(image_name)] = std::move(entry); }

  // Throws BackendImageError when the image file does not exist.
  std::vector<SegmentResult> recognize(const std::filesystem::path& image, const RunOptions& options) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Entry> entries_;
};

class FixtureBackend : public OcrBackend {
 public:
  explicit FixtureBackend(FixtureOcrEngine engine) : engine_(std::move(engine)) {}
  std::vector<SegmentResult> run(const std::filesystem::path& image, const RunOptions& options) override {
    return engine_.recognize(image, options);
  }

 private:
  FixtureOcrEngine engine_;
};

}  // namespace mactrace
