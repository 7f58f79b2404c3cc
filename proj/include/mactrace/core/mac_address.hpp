#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "mactrace/core/error.hpp"

namespace mactrace {

class MalformedMac : public Error {
 public:
  using Error::Error;
};

// 24-bit IEEE organizationally unique identifier.
using Oui = std::uint32_t;

/// A 48-bit hardware address. Canonical text is 12 lowercase hex digits.
class MacAddress {
 public:
  MacAddress() = default;
  explicit constexpr MacAddress(std::array<std::uint8_t, 6> octets) : octets_(octets) {}

  static MacAddress from_value(std::uint64_t value);

  const std::array<std::uint8_t, 6>& octets() const { return octets_; }
  std::uint64_t value() const;

  Oui oui() const { return (Oui{octets_[0]} << 16) | (Oui{octets_[1]} << 8) | octets_[2]; }
  std::uint32_t nic() const {
    return (std::uint32_t{octets_[3]} << 16) | (std::uint32_t{octets_[4]} << 8) | octets_[5];
  }
  // Fourth and fifth octets as one 16-bit value, the coordinate used for model banding.
  std::uint16_t band_value() const {
    return static_cast<std::uint16_t>((octets_[3] << 8) | octets_[4]);
  }

  std::string canonical() const;
  // Octet pairs joined with `separator`, e.g. format(':') == "a0:2b:ca:92:1c:da".
  std::string format(char separator) const;

  auto operator<=>(const MacAddress&) const = default;

 private:
  std::array<std::uint8_t, 6> octets_{};
};

// Accepts 12 hex digits, optionally with one separator character (':', '-', ' ' or '.')
// used consistently between every octet pair. Throws MalformedMac otherwise.
MacAddress parse_mac(std::string_view text);
std::optional<MacAddress> try_parse_mac(std::string_view text);

std::string format_oui(Oui oui, char separator = ':');
// Six hex digits, optionally separated like a MAC prefix ("00180A", "00:18:0a").
std::optional<Oui> parse_oui(std::string_view text);

inline bool is_hex_digit(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

}  // namespace mactrace

template <>
struct std::hash<mactrace::MacAddress> {
  std::size_t operator()(const mactrace::MacAddress& mac) const noexcept {
    return std::hash<std::uint64_t>{}(mac.value());
  }
};
