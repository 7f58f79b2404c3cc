#include "mactrace/core/oui_registry.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace mactrace {

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xe0) == 0xc0 && c >= 0xc2) {
      extra = 1;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
    } else if ((c & 0xf8) == 0xf0 && c <= 0xf4) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

// RFC 4180 records; quoted fields may span lines and contain doubled quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field.push_back(c);
        any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

bool is_six_hex(std::string_view s) {
  return s.size() == 6 && std::all_of(s.begin(), s.end(), is_hex_digit);
}

}  // namespace

bool OuiRegistry::contains(std::string_view prefix_text) const {
  auto prefix = parse_oui(prefix_text);
  return prefix && contains(*prefix);
}

std::optional<std::string_view> OuiRegistry::organization(Oui prefix) const {
  auto it = entries_.find(prefix);
  if (it == entries_.end()) return std::nullopt;
  return std::string_view{it->second};
}

std::vector<Oui> OuiRegistry::prefixes() const {
  std::vector<Oui> out;
  out.reserve(entries_.size());
  for (const auto& entry : entries_) out.push_back(entry.first);
  std::sort(out.begin(), out.end());
  return out;
}

bool OuiRegistry::insert(Oui prefix, std::string organization) {
  if (!entries_.emplace(prefix, std::move(organization)).second) {
    ++duplicates_;
    return false;
  }
  return true;
}

OuiRegistry load_oui_registry(std::istream& source, RegistryFormat format) {
  const std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (!valid_utf8(text)) throw RegistryParse("OUI registry is not valid UTF-8");

  OuiRegistry registry;
  if (format == RegistryFormat::ieee_csv) {
    for (const auto& row : parse_csv(text)) {
      // Registry,Assignment,Organization Name[,Organization Address]
      if (row.size() < 3 || trim(row[0]) != "MA-L" || !is_six_hex(trim(row[1]))) {
        ++registry.skipped_;
        continue;
      }
      registry.insert(*parse_oui(trim(row[1])), std::string(trim(row[2])));
    }
  } else {
    std::istringstream lines{text};
    std::string line;
    while (std::getline(lines, line)) {
      const auto body = trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto split = body.find_first_of(" \t");
      if (split == std::string_view::npos || !is_six_hex(body.substr(0, split))) {
        ++registry.skipped_;
        continue;
      }
      const auto name = trim(body.substr(split));
      if (name.empty()) {
        ++registry.skipped_;
        continue;
      }
      registry.insert(*parse_oui(body.substr(0, split)), std::string(name));
    }
  }
  if (registry.size() == 0) throw RegistryParse("no valid OUI records found");
  return registry;
}

OuiRegistry load_oui_registry(const std::filesystem::path& path, RegistryFormat format) {
  std::ifstream in{path, std::ios::binary};
  if (!in) throw RegistryParse("cannot open OUI registry: " + path.string());
  return load_oui_registry(in, format);
}

OuiRegistry load_oui_registry(const std::filesystem::path& path) {
  return load_oui_registry(path, path.extension() == ".csv" ? RegistryFormat::ieee_csv
                                                            : RegistryFormat::line_pairs);
}

}  // namespace mactrace
