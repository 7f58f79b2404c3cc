#include <sstream>

#include "mactrace/core/json.hpp"
#include "mactrace/extraction/ocr_backend.hpp"

namespace mactrace {

FixtureOcrEngine FixtureOcrEngine::load(const std::filesystem::path& path) {
  FixtureOcrEngine engine;
  read_jsonl(path, [&](const Json& j) {
    Entry entry;
    entry.segments = j.at("segments").get<std::vector<std::vector<std::string>>>();
    entry.readable_rotation = j.value("readable_rotation", 0);
    engine.add(j.at("image").get<std::string>(), std::move(entry));
  });
  return engine;
}

std::vector<SegmentResult> FixtureOcrEngine::recognize(const std::filesystem::path& image,
                                                       const RunOptions& options) const {
  if (!std::filesystem::exists(image)) throw BackendImageError("image not found: " + image.string());

  std::vector<std::vector<std::string>> segments;
  int readable = 0;
  if (auto it = entries_.find(image.filename().string()); it != entries_.end()) {
    segments = it->second.segments;
    readable = it->second.readable_rotation;
  }
  if (!options.segment || segments.empty()) {
    std::vector<std::string> whole;
    for (const auto& s : segments) whole.insert(whole.end(), s.begin(), s.end());
    segments = {whole};
  }

  std::vector<SegmentResult> out;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (int rotation : options.rotations) {
      SegmentResult result;
      result.segment_index = static_cast<int>(s);
      result.rotation_deg = rotation;
      if (rotation == readable) {
        double y = 0;
        for (const auto& text : segments[s]) {
          const double width = 12.0 * static_cast<double>(text.size());
          result.lines.push_back({text, 0.9, {{{0, y}, {width, y}, {width, y + 20}, {0, y + 20}}}});
          y += 24;
        }
      }
      out.push_back(std::move(result));
    }
  }
  return out;
}

}  // namespace mactrace
