#include "mactrace/analysis/bands.hpp"

#include <algorithm>

namespace mactrace {

ModelBandIndex build_model_bands(std::span<const LabeledMac> labeled, std::uint32_t gap) {
  if (labeled.empty()) throw Error("model bands need at least one labeled address");

  std::map<Oui, std::map<std::string, std::vector<std::uint16_t>>> grouped;
  for (const auto& item : labeled) grouped[item.mac.oui()][item.model].push_back(item.mac.band_value());

  ModelBandIndex index;
  index.gap = gap;
  for (auto& [oui, models] : grouped) {
    auto& out = index.by_oui[oui];
    for (auto& [model, values] : models) {
      std::sort(values.begin(), values.end());
      ModelBands bands{model, {}};
      for (const auto v : values) {
        auto& iv = bands.intervals;
        if (!iv.empty() && static_cast<std::uint32_t>(v - iv.back().hi) <= gap) {
          iv.back().hi = v;
          ++iv.back().support;
        } else {
          iv.push_back({v, v, 1});
        }
      }
      out.push_back(std::move(bands));
    }
  }
  return index;
}

std::vector<ModelGuess> infer_model(const MacAddress& mac, const ModelBandIndex& index) {
  std::vector<ModelGuess> guesses;
  const auto it = index.by_oui.find(mac.oui());
  if (it == index.by_oui.end()) return guesses;
  const auto v = mac.band_value();
  for (const auto& bands : it->second) {
    for (const auto& interval : bands.intervals) {
      if (interval.contains(v)) {
        guesses.push_back({bands.model, interval.support});
        break;
      }
    }
  }
  std::sort(guesses.begin(), guesses.end(), [](const ModelGuess& a, const ModelGuess& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.model < b.model;
  });
  return guesses;
}

}  // namespace mactrace
