// OCR backend speaking the line protocol on stdin/stdout, answering from a fixture file.
// Test switches reorder, corrupt or fail replies.

#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mactrace/core/json.hpp"
#include "mactrace/extraction/ocr_backend.hpp"
#include "mactrace/extraction/ocr_protocol.hpp"

namespace {

using namespace mactrace;

struct Options {
  std::string fixture;
  std::size_t batch = 1;
  std::size_t malformed_every = 0;
  std::string fail_pattern;
  std::size_t exit_after = 0;
  int delay_ms = 0;
};

class LineReader {
 public:
  enum class Status { line, timeout, eof };

  Status next(std::string& line, int timeout_ms) {
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return Status::line;
      }
      if (eof_) {
        if (buffer_.empty()) return Status::eof;
        line = std::move(buffer_);
        buffer_.clear();
        return Status::line;
      }
      pollfd pfd{STDIN_FILENO, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, timeout_ms);
      if (ready == 0) return Status::timeout;
      if (ready < 0) {
        if (errno == EINTR) continue;
        eof_ = true;
        continue;
      }
      char chunk[65536];
      const auto n = ::read(STDIN_FILENO, chunk, sizeof chunk);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        eof_ = true;
      } else {
        buffer_.append(chunk, static_cast<std::size_t>(n));
      }
    }
  }

 private:
  std::string buffer_;
  bool eof_ = false;
};

std::int64_t loose_id(const std::string& line) {
  const auto j = Json::parse(line, nullptr, false);
  if (j.is_object() && j.contains("id") && j["id"].is_number_integer()) return j["id"].get<std::int64_t>();
  return -1;
}

std::string answer(const std::string& line, const FixtureOcrEngine& engine, const Options& opt) {
  OcrRequest request;
  try {
    request = decode_request(line);
  } catch (const Error& e) {
    return encode_error({loose_id(line), e.what()});
  }
  if (!opt.fail_pattern.empty() && request.image.find(opt.fail_pattern) != std::string::npos) {
    return encode_error({request.id, "injected failure for " + request.image});
  }
  try {
    return encode_reply({request.id, engine.recognize(request.image, {request.segment, request.rotations})});
  } catch (const Error& e) {
    return encode_error({request.id, e.what()});
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Fixture OCR backend"};
  app.add_option("--fixture", opt.fixture, "JSONL text fixture keyed by image file name");
  app.add_option("--batch", opt.batch, "Collect up to N requests and answer them in reverse order")
      ->check(CLI::PositiveNumber);
  app.add_option("--malformed-every", opt.malformed_every, "Replace every N-th reply with an invalid line");
  app.add_option("--fail-pattern", opt.fail_pattern, "Answer with an error for images whose path contains this");
  app.add_option("--exit-after", opt.exit_after, "Exit after N replies");
  app.add_option("--delay-ms", opt.delay_ms, "Sleep before each reply");
  CLI11_PARSE(app, argc, argv);

  FixtureOcrEngine engine;
  try {
    if (!opt.fixture.empty()) engine = FixtureOcrEngine::load(opt.fixture);
  } catch (const std::exception& e) {
    std::cerr << "fixture_ocr_backend: " << e.what() << '\n';
    return 2;
  }

  LineReader reader;
  std::vector<std::string> pending;
  std::size_t replies = 0;
  bool done = false;

  auto flush = [&] {
    std::reverse(pending.begin(), pending.end());
    for (const auto& line : pending) {
      if (opt.delay_ms > 0) ::usleep(static_cast<useconds_t>(opt.delay_ms) * 1000);
      ++replies;
      if (opt.malformed_every > 0 && replies % opt.malformed_every == 0) {
        std::cout << "{\"id\": \"not a reply\"\n";
      } else {
        std::cout << answer(line, engine, opt) << '\n';
      }
      std::cout.flush();
      if (opt.exit_after > 0 && replies >= opt.exit_after) {
        done = true;
        break;
      }
    }
    pending.clear();
  };

  std::string line;
  while (!done) {
    const auto status = reader.next(line, pending.empty() ? -1 : 50);
    if (status == LineReader::Status::eof) {
      flush();
      break;
    }
    if (status == LineReader::Status::timeout) {
      flush();
      continue;
    }
    if (line.empty()) continue;
    pending.push_back(line);
    if (pending.size() >= opt.batch) flush();
  }
  return 0;
}
