#include <doctest.h>

#include "mactrace/core/json.hpp"
#include "mactrace/core/random.hpp"
#include "mactrace/extraction/ocr_backend.hpp"
#include "temp_dir.hpp"

using namespace mactrace;
using test::TempDir;

namespace {

// Images 0..n-1 on disk, each with one distinct line of text readable upright.
struct BackendFixture {
  TempDir dir{"ocr"};
  std::vector<std::filesystem::path> images;

  explicit BackendFixture(int n) {
    std::string fixture;
    for (int i = 0; i < n; ++i) {
      const auto name = "img" + std::to_string(i) + ".jpg";
      test::write_file(dir / name, "x");
      images.push_back(dir / name);
      fixture += Json{{"image", name}, {"segments", {{"text " + std::to_string(i)}}}, {"readable_rotation", 0}}.dump();
      fixture += '\n';
    }
    test::write_file(dir / "ocr.jsonl", fixture);
  }

  std::vector<std::string> argv(std::vector<std::string> extra = {}) const {
    std::vector<std::string> out{MACTRACE_FIXTURE_OCR_BACKEND, "--fixture", (dir / "ocr.jsonl").string()};
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
  }
};

std::string first_text(const std::vector<SegmentResult>& segments) {
  for (const auto& s : segments) {
    if (!s.lines.empty()) return s.lines.front().text;
  }
  return {};
}

const RunOptions kUpright{false, {0}};

}  // namespace

TEST_SUITE("ocr_protocol") {

TEST_CASE("request and reply round trip") {
  OcrRequest request{7, "/tmp/a.jpg", false, {0, 180}};
  const auto back = decode_request(encode_request(request));
  CHECK(back.id == 7);
  CHECK(back.image == "/tmp/a.jpg");
  CHECK_FALSE(back.segment);
  CHECK(back.rotations == std::vector<int>{0, 180});

  OcrReply reply{7, {{1, 90, {{"MAC a0:2b", 0.75, {{{0, 0}, {10, 0}, {10, 5}, {0, 5}}}}}}, {0, 0, {}}}};
  const auto line = encode_reply(reply);
  CHECK(line.find('\n') == std::string::npos);
  const auto decoded = std::get<OcrReply>(decode_reply(line));
  CHECK(decoded.id == 7);
  CHECK(decoded.segments == reply.segments);

  const auto err = std::get<OcrErrorReply>(decode_reply(encode_error({9, "unreadable"})));
  CHECK(err.id == 9);
  CHECK(err.error == "unreadable");
}

TEST_CASE("malformed replies are rejected") {
  for (const char* bad : {"", "not json", "[]", "{\"segments\":[]}", "{\"id\":\"1\",\"segments\":[]}", "{\"id\":1}",
                          "{\"id\":1,\"segments\":[{\"segment_index\":0,\"rotation_deg\":45,\"lines\":[]}]}",
                          "{\"id\":1,\"segments\":[{\"segment_index\":-1,\"rotation_deg\":0,\"lines\":[]}]}",
                          "{\"id\":1,\"segments\":[{\"segment_index\":0,\"rotation_deg\":0,\"lines\":[{\"text\":\"a\","
                          "\"confidence\":2,\"box\":[[0,0],[0,0],[0,0],[0,0]]}]}]}",
                          "{\"id\":1,\"segments\":[{\"segment_index\":0,\"rotation_deg\":0,\"lines\":[{\"text\":\"a\","
                          "\"confidence\":0.5,\"box\":[[0,0],[0,0],[0,0]]}]}]}",
                          "{\"id\":1,\"error\":\"x\",\"segments\":[]}"}) {
    CHECK_THROWS_AS(decode_reply(bad), BackendMalformedReply);
  }
  try {
    decode_reply("garbage line");
  } catch (const BackendMalformedReply& e) {
    CHECK(e.line() == "garbage line");
    CHECK(std::string(e.what()).find("garbage line") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_request("{}"), Error);
}

TEST_CASE("random replies survive encoding") {
  Rng rng(88);
  for (int i = 0; i < 1000; ++i) {
    OcrReply reply;
    reply.id = static_cast<std::int64_t>(rng.below(1u << 30));
    const auto segments = rng.below(4);
    for (std::size_t s = 0; s < segments; ++s) {
      SegmentResult r{static_cast<int>(s), static_cast<int>(rng.pick(all_rotations())), {}};
      const auto lines = rng.below(4);
      for (std::size_t l = 0; l < lines; ++l) {
        std::string text;
        for (std::size_t c = rng.below(20); c > 0; --c) text += static_cast<char>(' ' + rng.below(95));
        if (rng.chance(0.1)) text += "\xc3\xa9\"\\";
        OcrLine line{text, static_cast<double>(rng.below(101)) / 100.0, {}};
        for (auto& p : line.box) p = {static_cast<double>(rng.below(4000)), static_cast<double>(rng.below(4000)) / 4};
        r.lines.push_back(line);
      }
      reply.segments.push_back(r);
    }
    const auto back = std::get<OcrReply>(decode_reply(encode_reply(reply)));
    REQUIRE(back.id == reply.id);
    REQUIRE(back.segments == reply.segments);
  }
}

TEST_CASE("process backend answers in request order") {
  BackendFixture fx(20);
  ProcessBackend backend(fx.argv({"--batch", "5"}));
  CHECK(first_text(backend.run(fx.images[3], kUpright)) == "text 3");
  std::vector<ProcessBackend::BatchItem> items;
  for (const auto& image : fx.images) items.push_back({image, kUpright});
  const auto results = backend.run_many(items, 8);
  REQUIRE(results.size() == 20);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK_FALSE(results[i].error);
    CHECK(first_text(results[i].segments) == "text " + std::to_string(i));
  }
  const auto full = backend.run(fx.images[0], {});
  CHECK(full.size() == 4);
}

TEST_CASE("process backend errors are per image") {
  BackendFixture fx(4);
  ProcessBackend backend(fx.argv({"--fail-pattern", "img2"}));
  std::vector<ProcessBackend::BatchItem> items;
  for (const auto& image : fx.images) items.push_back({image, kUpright});
  items.push_back({fx.dir / "absent.jpg", kUpright});
  const auto results = backend.run_many(items);
  CHECK_FALSE(results[0].error);
  CHECK(results[2].error);
  CHECK(results[4].error);
  CHECK(first_text(results[3].segments) == "text 3");
  CHECK_THROWS_AS(backend.run(fx.images[2], kUpright), BackendImageError);
  CHECK(first_text(backend.run(fx.images[1], kUpright)) == "text 1");
}

TEST_CASE("process backend surfaces malformed replies and exits") {
  BackendFixture fx(3);
  {
    ProcessBackend backend(fx.argv({"--malformed-every", "2"}));
    CHECK_NOTHROW(backend.run(fx.images[0], kUpright));
    CHECK_THROWS_AS(backend.run(fx.images[1], kUpright), BackendMalformedReply);
    CHECK(first_text(backend.run(fx.images[2], kUpright)) == "text 2");
  }
  {
    ProcessBackend backend(fx.argv({"--exit-after", "1"}));
    CHECK_NOTHROW(backend.run(fx.images[0], kUpright));
    CHECK_THROWS_AS(backend.run(fx.images[1], kUpright), BackendUnavailable);
  }
  {
    ProcessBackend backend(fx.argv({"--delay-ms", "300"}), std::chrono::milliseconds{50});
    CHECK_THROWS_AS(backend.run(fx.images[0], kUpright), BackendUnavailable);
  }
  CHECK_THROWS_AS(ProcessBackend({"/nonexistent/ocr-backend"}), BackendUnavailable);
}

}  // TEST_SUITE
