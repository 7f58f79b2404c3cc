#include "mactrace/core/mac_address.hpp"

namespace mactrace {

namespace {

constexpr char kHex[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool is_separator(char c) { return c == ':' || c == '-' || c == ' ' || c == '.'; }

// Reads `count` octets either packed or separated by one consistent separator.
template <std::size_t N>
std::optional<std::array<std::uint8_t, N>> parse_octets(std::string_view text) {
  std::size_t stride = 0;
  char separator = 0;
  if (text.size() == 2 * N) {
    stride = 2;
  } else if (text.size() == 3 * N - 1) {
    stride = 3;
    separator = text[2];
    if (!is_separator(separator)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  std::array<std::uint8_t, N> octets{};
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t pos = i * stride;
    const int hi = hex_value(text[pos]);
    const int lo = hex_value(text[pos + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    if (stride == 3 && i + 1 < N && text[pos + 2] != separator) return std::nullopt;
  }
  return octets;
}

}  // namespace

MacAddress MacAddress::from_value(std::uint64_t value) {
  std::array<std::uint8_t, 6> octets{};
  for (int i = 5; i >= 0; --i) {
    octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 0xff);
    value >>= 8;
  }
  return MacAddress{octets};
}

std::uint64_t MacAddress::value() const {
  std::uint64_t v = 0;
  for (auto o : octets_) v = v << 8 | o;
  return v;
}

std::string MacAddress::canonical() const {
  std::string out;
  out.reserve(12);
  for (auto o : octets_) {
    out.push_back(kHex[o >> 4]);
    out.push_back(kHex[o & 0xf]);
  }
  return out;
}

std::string MacAddress::format(char separator) const {
  std::string out;
  out.reserve(17);
  for (std::size_t i = 0; i < octets_.size(); ++i) {
    if (i != 0) out.push_back(separator);
    out.push_back(kHex[octets_[i] >> 4]);
    out.push_back(kHex[octets_[i] & 0xf]);
  }
  return out;
}

std::optional<MacAddress> try_parse_mac(std::string_view text) {
  auto octets = parse_octets<6>(text);
  if (!octets) return std::nullopt;
  return MacAddress{*octets};
}

MacAddress parse_mac(std::string_view text) {
  if (auto mac = try_parse_mac(text)) return *mac;
  throw MalformedMac("malformed MAC address: \"" + std::string(text) + "\"");
}

std::string format_oui(Oui oui, char separator) {
  std::string out;
  for (int shift = 16; shift >= 0; shift -= 8) {
    if (shift != 16 && separator != 0) out.push_back(separator);
    const auto o = (oui >> shift) & 0xff;
    out.push_back(kHex[o >> 4]);
    out.push_back(kHex[o & 0xf]);
  }
  return out;
}

std::optional<Oui> parse_oui(std::string_view text) {
  auto octets = parse_octets<3>(text);
  if (!octets) return std::nullopt;
  return (Oui{(*octets)[0]} << 16) | (Oui{(*octets)[1]} << 8) | (*octets)[2];
}

}  // namespace mactrace
