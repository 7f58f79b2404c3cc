#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace mactrace::test {

namespace {

bool hex(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

bool alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + ('a' - 'A')) : c; }

std::string hex_only_lower(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (hex(c)) out.push_back(lower(c));
  }
  return out;
}

bool bare_form(std::string_view s) {
  return s.size() == 12 && std::all_of(s.begin(), s.end(), hex);
}

bool separated_form(std::string_view s) {
  if (s.size() != 17) return false;
  const char sep = s[2];
  if (sep != ':' && sep != '-' && sep != ' ' && sep != '.') return false;
  for (std::size_t k = 0; k < 17; ++k) {
    if (k % 3 == 2) {
      if (s[k] != sep) return false;
    } else if (!hex(s[k])) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<OracleMatch> brute_force_scan(std::string_view text) {
  std::vector<OracleMatch> out;
  const std::size_t n = text.size();
  for (std::size_t start = 0; start < n; ++start) {
    for (const std::size_t len : {std::size_t{12}, std::size_t{17}}) {
      if (start + len > n) continue;
      if (start > 0 && alnum(text[start - 1])) continue;
      if (start + len < n && alnum(text[start + len])) continue;
      const auto sub = text.substr(start, len);
      if (bare_form(sub) || separated_form(sub)) out.push_back({hex_only_lower(sub), std::string(sub)});
    }
  }

  std::string norm;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < n; ++i) {
    if (alnum(text[i])) {
      norm.push_back(lower(text[i]));
      origin.push_back(i);
    }
  }
  for (std::size_t start = 0; start + 12 <= norm.size(); ++start) {
    const auto sub = std::string_view(norm).substr(start, 12);
    if (!bare_form(sub)) continue;
    if (start > 0 && hex(norm[start - 1])) continue;
    if (start + 12 < norm.size() && hex(norm[start + 12])) continue;
    const auto first = origin[start];
    const auto last = origin[start + 11];
    out.push_back({std::string(sub), std::string(text.substr(first, last - first + 1))});
  }
  return out;
}

std::set<std::string> brute_force_addresses(std::string_view text) {
  std::set<std::string> out;
  for (const auto& m : brute_force_scan(text)) out.insert(m.canonical);
  return out;
}

std::string random_mac_text(Rng& rng) {
  static const std::vector<std::string> words{"MAC",  "S/N",   "Model:", "WAN",  "SSID:", "Serial", "P/N",
                                              "FCC",  "ID",    "Ver",    "2.4G", "5GHz",  "LAN1",   "Made",
                                              "é",    "\xff", "(",      ")",    "#",     "\n",     "\t"};
  static const std::string hexchars = "0123456789abcdefABCDEF";
  static const std::string seps = ":- .";

  const auto random_hex = [&](std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(hexchars[rng.below(hexchars.size())]);
    return s;
  };
  const auto address = [&]() {
    const auto digits = random_hex(12);
    const auto style = rng.below(8);
    std::string s;
    if (style < 2) return digits;
    const char sep = seps[rng.below(seps.size())];
    for (std::size_t k = 0; k < 6; ++k) {
      if (k != 0) {
        // Occasionally break the separator consistency.
        s.push_back(style == 7 && k == 3 ? seps[(seps.find(sep) + 1) % seps.size()] : sep);
      }
      s += digits.substr(2 * k, 2);
    }
    if (style == 6) s.erase(s.size() - 1);  // one digit short
    return s;
  };

  std::string text;
  const auto pieces = 3 + rng.below(10);
  for (std::size_t p = 0; p < pieces; ++p) {
    const auto kind = rng.below(10);
    std::string piece;
    if (kind < 4) {
      piece = address();
    } else if (kind < 7) {
      piece = words[rng.below(words.size())];
    } else if (kind < 9) {
      piece = random_hex(1 + rng.below(20));
    } else {
      piece = std::string(1, seps[rng.below(seps.size())]);
    }
    if (!text.empty()) {
      const auto glue = rng.below(4);
      if (glue == 0) {
        // no gap
      } else if (glue == 1) {
        text.push_back(seps[rng.below(seps.size())]);
      } else {
        text.push_back(' ');
      }
    }
    text += piece;
  }
  return text;
}

std::set<std::uint32_t> scan_line_pairs(std::string_view text) {
  std::set<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && (line[b] == ' ' || line[b] == '\t')) ++b;
    line = line.substr(b);
    if (line.empty() || line[0] == '#') continue;
    const auto split = line.find_first_of(" \t");
    if (split != 6) continue;
    const auto token = line.substr(0, 6);
    if (!std::all_of(token.begin(), token.end(), hex)) continue;
    if (line.find_first_not_of(" \t", split) == std::string::npos) continue;
    out.insert(static_cast<std::uint32_t>(std::strtoul(token.c_str(), nullptr, 16)));
  }
  return out;
}

int winding_number(const Ring& ring, double x, double y) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x0, y0] = ring[i];
    const auto [x1, y1] = ring[(i + 1) % n];
    const double side = (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0);
    if (y0 <= y) {
      if (y1 > y && side > 0) ++wn;
    } else if (y1 <= y && side < 0) {
      --wn;
    }
  }
  return wn;
}

bool on_boundary(const Ring& ring, double x, double y, double eps) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x0, y0] = ring[i];
    const auto [x1, y1] = ring[(i + 1) % n];
    const double cross = (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0);
    if (std::abs(cross) > eps) continue;
    if (x < std::min(x0, x1) - eps || x > std::max(x0, x1) + eps) continue;
    if (y < std::min(y0, y1) - eps || y > std::max(y0, y1) + eps) continue;
    return true;
  }
  return false;
}

bool inside_by_winding(const Ring& ring, double x, double y) {
  return on_boundary(ring, x, y) || winding_number(ring, x, y) != 0;
}

Ring random_star_polygon(Rng& rng, double cx, double cy, double r_min, double r_max, int vertices) {
  std::vector<double> angles;
  // One angle per equal sector keeps them distinct and sorted.
  const double sector = 2 * std::numbers::pi / vertices;
  for (int k = 0; k < vertices; ++k) angles.push_back(sector * (k + 0.05 + 0.9 * rng.unit()));
  Ring ring;
  for (const double a : angles) {
    const double r = rng.uniform(r_min, r_max);
    ring.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
  }
  return ring;
}

double vector_distance_km(double lat1, double lon1, double lat2, double lon2) {
  const double d = std::numbers::pi / 180;
  const auto unit = [&](double lat, double lon) {
    return std::array<double, 3>{std::cos(lat * d) * std::cos(lon * d), std::cos(lat * d) * std::sin(lon * d),
                                 std::sin(lat * d)};
  };
  const auto a = unit(lat1, lon1);
  const auto b = unit(lat2, lon2);
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  const std::array<double, 3> c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  const double cross = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  return 6371.0 * std::atan2(cross, dot);
}

std::vector<LabeledMac> banded_fixture(std::uint64_t seed, std::size_t per_model) {
  struct Layer {
    const char* model;
    std::uint8_t first_byte4;
  };
  // Four fourth-byte values per layer; each model owns two layers.
  const std::vector<Layer> layers{{"MR18", 0x10}, {"MR33", 0x14}, {"MR42", 0x18},
                                  {"MR18", 0x40}, {"MR33", 0x44}, {"MR42", 0x48}};
  Rng rng(seed);
  std::set<std::uint64_t> used;
  std::vector<LabeledMac> out;
  const std::uint64_t oui = 0x00180a;
  for (const auto& layer : layers) {
    std::size_t placed = 0;
    while (placed < per_model / 2) {
      const std::uint64_t band = static_cast<std::uint64_t>(layer.first_byte4) * 256 + rng.below(4 * 256);
      const std::uint64_t value = (oui << 24) | (band << 8) | rng.below(256);
      if (!used.insert(value).second) continue;
      out.push_back({MacAddress::from_value(value), layer.model});
      ++placed;
    }
  }
  return out;
}

ConstructedValidationSet constructed_validation_set() {
  const auto m1 = parse_mac("a0:2b:ca:92:1c:da");
  const auto m2 = parse_mac("10-29-ca-2a-be-2f");
  const auto m3 = parse_mac("00180a112233");
  const auto m4 = parse_mac("e8:9f:80:44:55:66");
  using Macs = std::set<MacAddress>;
  using Flags = std::set<AnnotationFlag>;

  ConstructedValidationSet s;
  const auto image = [&](const std::string& id, std::size_t candidates, std::size_t words, Macs valid) {
    s.results.push_back({id, candidates, words, std::move(valid)});
    s.worklist.push_back({id, partition_of(candidates, words)});
  };
  const auto note = [&](const std::string& id, const std::string& reviewer, Macs macs, Flags flags = {}) {
    s.annotations.push_back({id, reviewer, std::move(macs), std::move(flags)});
  };

  // Per-image trace: partition, pipeline addresses, reviewer sets -> outcome.
  image("img01", 1, 4, {m1});  // P1 {m1} vs {m1},{m1} -> TP
  note("img01", "1", {m1});
  note("img01", "2", {m1});
  image("img02", 2, 6, {m1, m2});  // P1 {m1,m2} vs {m1},{m1} -> TP, FP
  note("img02", "1", {m1});
  note("img02", "2", {m1});
  image("img03", 1, 3, {m1});  // P1 {m1} vs {m1},{m2} -> inconclusive
  note("img03", "1", {m1});
  note("img03", "2", {m2});
  image("img04", 1, 9, {});  // P1, candidate with unregistered OUI, both empty -> TN
  note("img04", "1", {});
  note("img04", "2", {});
  image("img05", 1, 2, {m3});  // P1 {m3} vs placeholder,{} -> inconclusive
  note("img05", "1", {}, {AnnotationFlag::placeholder});
  note("img05", "2", {});
  image("img06", 1, 2, {m3});  // P1 {m3} vs {},{} -> FP
  note("img06", "1", {});
  note("img06", "2", {});
  image("img07", 1, 5, {m1});  // P1, reviewers 1 and 2 chosen over 10 -> TP
  note("img07", "2", {m1});
  note("img07", "10", {m2});
  note("img07", "1", {m1});
  image("img08", 0, 5, {});  // P2 {} vs {m4},{m4} -> FN
  note("img08", "1", {m4});
  note("img08", "2", {m4});
  image("img09", 0, 3, {});  // P2 {} vs {m4},{} -> TN (no pipeline candidates)
  note("img09", "1", {m4});
  note("img09", "2", {});
  image("img10", 0, 0, {});  // P2 {} vs {},{} -> TN
  note("img10", "1", {});
  note("img10", "2", {});
  image("img11", 0, 8, {});  // P2, one reviewer only -> missing
  note("img11", "1", {});
  image("img12", 0, 10, {});  // P2 (ten words), redacted,{} -> TN
  note("img12", "1", {}, {AnnotationFlag::redacted});
  note("img12", "2", {});
  image("img13", 0, 30, {});  // P3 {} vs {},{} -> TN
  note("img13", "1", {});
  note("img13", "2", {});
  image("img14", 0, 11, {});  // P3 (eleven words) {} vs {m2},{m2} -> FN
  note("img14", "1", {m2});
  note("img14", "2", {m2});
  image("img15", 0, 40, {});  // P3 {} vs {m2},{m3} -> TN
  note("img15", "1", {m2});
  note("img15", "2", {m3});
  image("img16", 0, 25, {});  // P3, reviewer 1's first record wins: {m1},{m1} -> FN
  note("img16", "1", {m1});
  note("img16", "1", {m2});
  note("img16", "2", {m1});
  image("img17", 1, 7, {m2});  // P1 {m2} vs {m2,m3},{m2,m3} -> TP, FN
  note("img17", "1", {m2, m3});
  note("img17", "2", {m2, m3});
  image("img18", 1, 6, {m4});  // P1 {m4} vs {m4},placeholder -> inconclusive
  note("img18", "1", {m4});
  note("img18", "2", {}, {AnnotationFlag::placeholder});
  image("img19", 0, 50, {});  // P3, non-numeric reviewer ids, {},{} -> TN
  note("img19", "b", {});
  note("img19", "a", {});
  image("img20", 2, 8, {m1, m2});  // P1 {m1,m2} vs {m3},{m3} -> FP, FP, FN
  note("img20", "1", {m3});
  note("img20", "2", {m3});

  s.expected_counts = {ConfusionCounts{4, 4, 2, 1}, ConfusionCounts{0, 0, 1, 3}, ConfusionCounts{0, 0, 2, 3}};
  s.expected_inconclusive = {3, 0, 0};
  s.expected_annotated = {10, 4, 5};
  s.expected_missing = 1;
  return s;
}

}  // namespace mactrace::test
