#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mactrace/core/mac_address.hpp"

namespace mactrace {

inline constexpr std::uint32_t kDefaultBandGap = 512;

struct LabeledMac {
  MacAddress mac;
  std::string model;
};

// Closed interval over MacAddress::band_value().
struct BandInterval {
  std::uint16_t lo = 0;
  std::uint16_t hi = 0;
  std::size_t support = 0;  // labeled addresses inside
  bool contains(std::uint16_t v) const { return v >= lo && v <= hi; }
};

struct ModelBands {
  std::string model;
  std::vector<BandInterval> intervals;  // sorted, disjoint
};

struct ModelBandIndex {
  std::uint32_t gap = kDefaultBandGap;
  std::map<Oui, std::vector<ModelBands>> by_oui;  // models sorted by name
};

/// Groups addresses by (OUI, model), then coalesces sorted band values whose neighbours are at
/// most `gap` apart into intervals. Throws Error on an empty input.
ModelBandIndex build_model_bands(std::span<const LabeledMac> labeled, std::uint32_t gap = kDefaultBandGap);

struct ModelGuess {
  std::string model;
  std::size_t support = 0;
};

// Models with an interval containing the address's band value, highest support first
// (ties by model name). Empty for an unknown OUI or when nothing contains it.
std::vector<ModelGuess> infer_model(const MacAddress& mac, const ModelBandIndex& index);

}  // namespace mactrace
