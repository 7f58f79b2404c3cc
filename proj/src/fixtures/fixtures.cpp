#include "mactrace/fixtures/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "mactrace/analysis/geo.hpp"
#include "mactrace/analysis/postal.hpp"
#include "mactrace/core/random.hpp"
#include "mactrace/geolocate/timeline.hpp"

namespace mactrace {

namespace {

struct Centroid {
  GeoPoint point;
  std::string country;
  std::string postal_code;
  std::string city;
};

struct PostalGrid {
  std::vector<Centroid> us;
  std::vector<Centroid> gb;
  std::vector<Centroid> de;
  std::vector<Centroid> ca;

  const std::vector<Centroid>& of(const std::string& country) const {
    if (country == "GB") return gb;
    if (country == "DE") return de;
    if (country == "CA") return ca;
    return us;
  }
};

const std::vector<std::string> kTowns = {"Springfield", "Riverton", "Fairview", "Madison",  "Georgetown",
                                         "Salem",       "Clinton",  "Franklin", "Greenville", "Bristol",
                                         "Ashland",     "Oxford",   "Milton",   "Newport",  "Dover"};

std::string padded(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

// Centroids at least 0.5 degrees apart, so more than 20 km, each with a distinct prefix.
PostalGrid make_grid() {
  PostalGrid g;
  for (int i = 0; i < 120; ++i) {
    const int prefix = 100 + i;
    g.us.push_back({{33.0 + 0.5 * (i / 10), -100.0 + 0.5 * (i % 10)},
                    "US",
                    std::to_string(prefix) + padded(static_cast<std::uint64_t>(i % 97), 2),
                    kTowns[static_cast<std::size_t>(i) % kTowns.size()]});
  }
  const char* areas[] = {"LS", "SW", "NW", "EH", "CF", "BS"};
  for (int i = 0; i < 30; ++i) {
    const std::string outward = std::string(areas[i % 6]) + std::to_string(1 + i / 6);
    g.gb.push_back({{51.0 + 0.5 * (i / 6), -3.0 + 0.5 * (i % 6)}, "GB", outward + " " + std::to_string(1 + i % 9) + "AB",
                    kTowns[static_cast<std::size_t>(i + 3) % kTowns.size()]});
  }
  for (int i = 0; i < 20; ++i) {
    g.de.push_back({{48.0 + 0.5 * (i / 5), 8.0 + 0.5 * (i % 5)}, "DE", std::to_string(10 + i) + padded(static_cast<std::uint64_t>(i * 7), 3),
                    kTowns[static_cast<std::size_t>(i + 7) % kTowns.size()]});
  }
  for (int i = 0; i < 10; ++i) {
    g.ca.push_back({{52.0 + 0.5 * (i / 5), -114.0 + 0.5 * (i % 5)}, "CA", "T" + std::to_string(i) + "P 1A1", "Calgary"});
  }
  return g;
}

std::string seller_prefix(const Centroid& c) {
  if (c.country == "US") return c.postal_code.substr(0, 3);
  if (c.country == "GB") return outward_code(c.postal_code);
  return c.postal_code.substr(0, 2);
}

std::size_t exact_count(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

GeoPoint jittered(Rng& rng, GeoPoint p) {
  return {round6(p.lat + rng.uniform(-0.001, 0.001)), round6(p.lon + rng.uniform(-0.001, 0.001))};
}

struct Device {
  MacAddress mac;
  std::string model;
  Category category = Category::never;
  bool unresolvable = false;
  bool match3 = false;
  bool mover = false;
};

struct Plan {
  std::string brand;
  std::string model;
  std::string country = "US";
  std::size_t home = 0;
  std::optional<Device> device;
  std::optional<MacAddress> second_mac;
  std::optional<MacAddress> distractor;
};

class Writer {
 public:
  Writer(const std::filesystem::path& dir, std::vector<std::string>& files) : dir_(dir), files_(files) {}

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream out{dir_ / name, std::ios::binary | std::ios::trunc};
    if (!out) throw Error("cannot write fixture file: " + (dir_ / name).string());
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string>& files_;
};

std::string random_image_id(Rng& rng) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::string id;
  for (int i = 0; i < 16; ++i) id.push_back(kAlphabet[rng.below(62)]);
  return id;
}

std::string mac_line(Rng& rng, const MacAddress& mac, const std::string& label) {
  auto upper = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };
  switch (rng.below(6)) {
    case 0: return label + ": " + upper(mac.format(':'));
    case 1: return label + ": " + mac.format(':');
    case 2: return label + " " + upper(mac.format('-'));
    case 3: return label + ": " + upper(mac.canonical());
    case 4: return label + " " + upper(mac.format(' '));
    default: return label + ": " + mac.format('.');
  }
}

const std::vector<std::string> kSparseLines = {"Made in China", "Wireless Router", "Quick Installation Guide", "Thank you"};
const std::vector<std::string> kDenseLines = {
    "Dual band wireless speeds up to 1750 Mbps with four gigabit ethernet ports for wired devices",
    "Please read this guide carefully before you install and set up your new wireless network device",
    "Supports WPA3 encryption guest networks parental controls and remote management from your phone",
};

}  // namespace

void validate(const FixtureSpec& spec) {
  const double rates[] = {spec.mac_density,       spec.mover_fraction,   spec.match3_rate_pre,
                          spec.match3_rate_post,  spec.match3_rate_both, spec.pre_share,
                          spec.post_share,        spec.both_share,       spec.unresolvable_rate,
                          spec.second_mac_rate,   spec.distractor_rate,  spec.foreign_seller_rate};
  for (const auto r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error("fixture rates must lie in [0, 1]");
  }
  if (spec.pre_share + spec.post_share + spec.both_share > 1.0 + 1e-12) throw Error("category shares exceed 1");
  if (spec.mac_density + spec.distractor_rate > 1.0 + 1e-12) throw Error("mac_density + distractor_rate exceed 1");
  if (spec.n_listings == 0) throw Error("fixtures need at least one listing");
  if (spec.brands.empty()) throw Error("fixtures need at least one brand");
  if (spec.listing_window_days <= 0 || spec.poll_days <= 0) throw Error("fixture day counts must be positive");
  parse_timestamp(spec.start_date);
}

FixtureSpec fixture_spec_from_json(const Json& j) {
  FixtureSpec s;
  const auto known = fixture_spec_to_json(s);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error("fixture spec: unknown key " + key);
  }
  s.n_listings = j.value("n_listings", s.n_listings);
  s.brands = j.value("brands", s.brands);
  s.mac_density = j.value("mac_density", s.mac_density);
  s.mover_fraction = j.value("mover_fraction", s.mover_fraction);
  s.match3_rate_pre = j.value("match3_rate_pre", s.match3_rate_pre);
  s.match3_rate_post = j.value("match3_rate_post", s.match3_rate_post);
  s.match3_rate_both = j.value("match3_rate_both", s.match3_rate_both);
  s.pre_share = j.value("pre_share", s.pre_share);
  s.post_share = j.value("post_share", s.post_share);
  s.both_share = j.value("both_share", s.both_share);
  s.unresolvable_rate = j.value("unresolvable_rate", s.unresolvable_rate);
  s.second_mac_rate = j.value("second_mac_rate", s.second_mac_rate);
  s.distractor_rate = j.value("distractor_rate", s.distractor_rate);
  s.foreign_seller_rate = j.value("foreign_seller_rate", s.foreign_seller_rate);
  s.marketplace_id = j.value("marketplace_id", s.marketplace_id);
  s.start_date = j.value("start_date", s.start_date);
  s.listing_window_days = j.value("listing_window_days", s.listing_window_days);
  s.poll_days = j.value("poll_days", s.poll_days);
  validate(s);
  return s;
}

Json fixture_spec_to_json(const FixtureSpec& s) {
  return {{"n_listings", s.n_listings},
          {"brands", s.brands},
          {"mac_density", s.mac_density},
          {"mover_fraction", s.mover_fraction},
          {"match3_rate_pre", s.match3_rate_pre},
          {"match3_rate_post", s.match3_rate_post},
          {"match3_rate_both", s.match3_rate_both},
          {"pre_share", s.pre_share},
          {"post_share", s.post_share},
          {"both_share", s.both_share},
          {"unresolvable_rate", s.unresolvable_rate},
          {"second_mac_rate", s.second_mac_rate},
          {"distractor_rate", s.distractor_rate},
          {"foreign_seller_rate", s.foreign_seller_rate},
          {"marketplace_id", s.marketplace_id},
          {"start_date", s.start_date},
          {"listing_window_days", s.listing_window_days},
          {"poll_days", s.poll_days}};
}

Json truth_to_json(const FixtureTruth& t) {
  return {{"listings", t.listings},
          {"mac_listings", t.mac_listings},
          {"distractor_listings", t.distractor_listings},
          {"second_macs", t.second_macs},
          {"pre_only", t.pre_only},
          {"post_only", t.post_only},
          {"both", t.both},
          {"never", t.never},
          {"movers", t.movers},
          {"stationary", t.stationary},
          {"pre_resolvable", t.pre_resolvable},
          {"pre_match3", t.pre_match3},
          {"post_resolvable", t.post_resolvable},
          {"post_match3", t.post_match3},
          {"both_match3", t.both_match3},
          {"sold", t.sold},
          {"poll_start", t.poll_start}};
}

FixtureTruth truth_from_json(const Json& j) {
  FixtureTruth t;
  t.listings = j.at("listings").get<std::size_t>();
  t.mac_listings = j.at("mac_listings").get<std::size_t>();
  t.distractor_listings = j.at("distractor_listings").get<std::size_t>();
  t.second_macs = j.at("second_macs").get<std::size_t>();
  t.pre_only = j.at("pre_only").get<std::size_t>();
  t.post_only = j.at("post_only").get<std::size_t>();
  t.both = j.at("both").get<std::size_t>();
  t.never = j.at("never").get<std::size_t>();
  t.movers = j.at("movers").get<std::size_t>();
  t.stationary = j.at("stationary").get<std::size_t>();
  t.pre_resolvable = j.at("pre_resolvable").get<std::size_t>();
  t.pre_match3 = j.at("pre_match3").get<std::size_t>();
  t.post_resolvable = j.at("post_resolvable").get<std::size_t>();
  t.post_match3 = j.at("post_match3").get<std::size_t>();
  t.both_match3 = j.at("both_match3").get<std::size_t>();
  t.sold = j.at("sold").get<std::size_t>();
  t.poll_start = j.at("poll_start").get<std::string>();
  return t;
}

std::vector<std::string> generate_fixtures(std::uint64_t seed, const FixtureSpec& spec,
                                           const std::filesystem::path& dir, FixtureTruth* truth_out) {
  validate(spec);
  Rng rng(seed);
  const auto grid = make_grid();
  const Day start_day = utc_day(parse_timestamp(spec.start_date));
  const Day poll_start = start_day + std::chrono::days{spec.listing_window_days + 1};
  const std::size_t n = spec.n_listings;

  FixtureTruth truth;
  truth.listings = n;
  truth.poll_start = format_date(poll_start);

  // Registry: two prefixes per brand, filler vendors, and unregistered prefixes for distractors.
  std::set<Oui> used_ouis;
  auto fresh_oui = [&] {
    for (;;) {
      const auto oui = static_cast<Oui>(rng.below(1u << 24)) & 0xFCFFFFu;
      if (used_ouis.insert(oui).second) return oui;
    }
  };
  std::map<std::string, std::vector<Oui>> brand_ouis;
  std::map<Oui, std::string> registry;
  for (const auto& brand : spec.brands) {
    for (int k = 0; k < 2; ++k) {
      const auto oui = fresh_oui();
      brand_ouis[brand].push_back(oui);
      registry[oui] = brand + " Technologies Co., Ltd.";
    }
  }
  for (int k = 0; k < 150; ++k) registry[fresh_oui()] = "Vendor " + padded(static_cast<std::uint64_t>(k), 3) + " Inc.";
  std::vector<Oui> unregistered;
  for (int k = 0; k < 10; ++k) unregistered.push_back(fresh_oui());

  // Three models per brand, each printed from its own 0x300-wide band of octets 4 and 5.
  struct Model {
    std::string name;
    std::uint16_t band_base;
  };
  std::map<std::string, std::vector<Model>> models;
  const char* series[] = {"AX", "AC", "N"};
  for (const auto& brand : spec.brands) {
    for (int m = 0; m < 3; ++m) {
      const auto base = static_cast<std::uint16_t>(0x1000 + m * 0x3000 + rng.below(0x800));
      models[brand].push_back({std::string(series[m]) + std::to_string(1000 + 500 * m + rng.below(5) * 100), base});
    }
  }

  std::set<MacAddress> used_macs;
  auto fresh_mac = [&](Oui oui, std::uint16_t band_base) {
    for (;;) {
      const std::uint64_t band = band_base + rng.below(0x300);
      const auto mac = MacAddress::from_value((std::uint64_t{oui} << 24) | (band << 8) | rng.below(256));
      if (used_macs.insert(mac).second) return mac;
    }
  };

  // Which listings carry what.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  const auto n_mac = exact_count(spec.mac_density, n);
  const auto n_distractor = std::min(exact_count(spec.distractor_rate, n), n - n_mac);
  truth.mac_listings = n_mac;
  truth.distractor_listings = n_distractor;

  std::vector<Plan> plans(n);
  for (auto& plan : plans) {
    plan.brand = rng.pick(spec.brands);
    plan.model = models[plan.brand][rng.below(3)].name;
  }

  const auto n_pre = exact_count(spec.pre_share, n_mac);
  const auto n_post = std::min(exact_count(spec.post_share, n_mac), n_mac - n_pre);
  const auto n_both = std::min(exact_count(spec.both_share, n_mac), n_mac - n_pre - n_post);
  const auto n_unres_pre = exact_count(spec.unresolvable_rate, n_pre);
  const auto n_unres_post = exact_count(spec.unresolvable_rate, n_post);
  truth.pre_only = n_pre;
  truth.post_only = n_post;
  truth.both = n_both;
  truth.never = n_mac - n_pre - n_post - n_both;
  truth.pre_resolvable = n_pre - n_unres_pre;
  truth.pre_match3 = exact_count(spec.match3_rate_pre, truth.pre_resolvable);
  truth.post_resolvable = n_post - n_unres_post;
  truth.post_match3 = exact_count(spec.match3_rate_post, truth.post_resolvable);
  truth.both_match3 = exact_count(spec.match3_rate_both, n_both);
  truth.movers = exact_count(spec.mover_fraction, n_both);
  truth.stationary = n_both - truth.movers;

  std::vector<std::size_t> both_ids;
  for (std::size_t r = 0; r < n_mac; ++r) {
    auto& plan = plans[order[r]];
    const auto& mlist = models[plan.brand];
    const auto it = std::find_if(mlist.begin(), mlist.end(), [&](const Model& m) { return m.name == plan.model; });
    Device d;
    d.model = plan.model;
    d.mac = fresh_mac(rng.pick(brand_ouis[plan.brand]), it->band_base);
    if (r < n_pre) {
      d.category = Category::pre_only;
      d.unresolvable = r < n_unres_pre;
      d.match3 = !d.unresolvable && r - n_unres_pre < truth.pre_match3;
    } else if (r < n_pre + n_post) {
      const auto k = r - n_pre;
      d.category = Category::post_only;
      d.unresolvable = k < n_unres_post;
      d.match3 = !d.unresolvable && k - n_unres_post < truth.post_match3;
    } else if (r < n_pre + n_post + n_both) {
      const auto k = r - n_pre - n_post;
      d.category = Category::both;
      d.match3 = k < truth.both_match3;
      both_ids.push_back(order[r]);
    }
    plan.device = d;
  }
  rng.shuffle(both_ids);
  for (std::size_t k = 0; k < truth.movers; ++k) plans[both_ids[k]].device->mover = true;

  std::vector<std::size_t> mac_ids(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_mac));
  std::sort(mac_ids.begin(), mac_ids.end());
  rng.shuffle(mac_ids);
  truth.second_macs = exact_count(spec.second_mac_rate, n_mac);
  for (std::size_t k = 0; k < truth.second_macs; ++k) {
    auto& plan = plans[mac_ids[k]];
    auto second = MacAddress::from_value(plan.device->mac.value() ^ 1);
    if (!used_macs.insert(second).second) second = fresh_mac(plan.device->mac.oui(), plan.device->mac.band_value());
    plan.second_mac = second;
  }
  for (std::size_t r = n_mac; r < n_mac + n_distractor; ++r) {
    plans[order[r]].distractor = fresh_mac(rng.pick(unregistered), 0x1000);
  }

  for (auto& plan : plans) {
    const bool forced_us = plan.device && plan.device->unresolvable;
    if (!forced_us && rng.chance(spec.foreign_seller_rate)) plan.country = rng.chance(2.0 / 3.0) ? "GB" : "DE";
    plan.home = rng.below(grid.of(plan.country).size());
  }

  auto other_centroid = [&](const std::string& country, std::size_t home) -> const Centroid& {
    const auto& list = grid.of(country);
    if (country == "US" && rng.chance(0.3)) {
      // Same first two digits, different third.
      const auto decade = home / 10 * 10;
      auto sibling = decade + rng.below(10);
      if (sibling == home) sibling = decade + (home - decade + 1) % 10;
      if (sibling < list.size()) return list[sibling];
    }
    auto k = rng.below(list.size() - 1);
    if (k >= home) ++k;
    return list[k];
  };

  std::filesystem::create_directories(dir / "images");
  std::vector<std::string> files;
  Writer writer(dir, files);

  auto marketplace = writer.open("marketplace.jsonl");
  auto ocr = writer.open("ocr.jsonl");
  auto wps = writer.open("wps.jsonl");
  auto history = writer.open("history.jsonl");
  auto pages = writer.open("pages.jsonl");
  auto labels = writer.open("labels.jsonl");
  std::vector<std::string> image_files;
  std::set<std::string> image_ids;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& plan = plans[i];
    const auto& home = grid.of(plan.country)[plan.home];

    Listing listing;
    listing.listing_id = std::to_string(126000000000ULL + i * 7 + rng.below(7));
    listing.marketplace_id = spec.marketplace_id;
    listing.title = plan.brand + " " + plan.model + " " +
                    rng.pick(std::vector<std::string>{"Wi-Fi Router", "Wireless Access Point", "Mesh Wi-Fi System",
                                                      "Dual Band Router"});
    const double c = rng.unit();
    listing.condition = parse_condition(c < 0.10   ? "New"
                                        : c < 0.16 ? "Open box"
                                        : c < 0.90 ? "Used"
                                        : c < 0.95 ? "Seller refurbished"
                                                   : "For parts or not working");
    listing.seller_location = {plan.country, home.city, seller_prefix(home)};
    listing.listed_at = start_of(start_day) + std::chrono::seconds{rng.below(86400ULL * spec.listing_window_days)};

    const auto n_images = 1 + rng.below(3);
    const auto label_image = rng.below(n_images);
    for (std::size_t k = 0; k < n_images; ++k) {
      std::string image_id;
      do image_id = random_image_id(rng);
      while (!image_ids.insert(image_id).second);
      ImageRef ref;
      ref.image_id = image_id;
      listing.image_refs.push_back(ref);

      std::vector<std::uint8_t> bytes = {0xFF, 0xD8, 0xFF, 0xE0, 0x00, 0x10, 'J', 'F', 'I', 'F', 0x00};
      const auto body = 64 + rng.below(192);
      for (std::size_t b = 0; b < body; ++b) bytes.push_back(static_cast<std::uint8_t>(rng.below(256)));
      bytes.push_back(0xFF);
      bytes.push_back(0xD9);
      const auto rel = "images/" + image_id + ".jpg";
      {
        files.push_back(rel);
        std::ofstream img{dir / rel, std::ios::binary | std::ios::trunc};
        img.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      }

      std::vector<std::vector<std::string>> segments;
      const bool has_label = k == label_image && (plan.device || plan.distractor);
      if (has_label) {
        std::vector<std::string> label = {plan.brand + " " + plan.model, "Model: " + plan.model};
        if (plan.device) label.push_back(mac_line(rng, plan.device->mac, "MAC"));
        if (plan.second_mac) label.push_back(mac_line(rng, *plan.second_mac, "5G MAC"));
        if (plan.distractor) label.push_back(mac_line(rng, *plan.distractor, "MAC"));
        label.push_back("S/N: 2" + padded(rng.below(1000000000000ULL), 12));
        label.push_back("Power: 12V 1.5A");
        const auto extra = rng.below(3);
        const auto at = rng.below(extra + 1);
        for (std::size_t s = 0; s <= extra; ++s) {
          segments.push_back(s == at ? label : std::vector<std::string>{rng.pick(kSparseLines)});
        }
      } else if (rng.chance(0.5)) {
        segments.push_back({rng.pick(kDenseLines)});
      } else {
        segments.push_back({rng.pick(kSparseLines)});
      }
      static const int kRotations[] = {0, 90, 180, 270};
      write_jsonl_line(ocr, {{"image", listing.listing_id + "_" + image_id + ".jpg"},
                             {"segments", segments},
                             {"readable_rotation", kRotations[rng.below(4)]}});
    }

    Json record = listing;
    record["brand"] = plan.brand;
    write_jsonl_line(marketplace, record);

    const bool sold = (plan.device && plan.device->category == Category::both) || rng.chance(0.06);
    const bool removed = !sold && rng.chance(0.05);
    if (sold) ++truth.sold;
    write_jsonl_line(pages, {{"listing_id", listing.listing_id},
                             {"status", removed ? 404 : 200},
                             {"body", removed ? ""
                                      : sold  ? "<html><body><h1>" + listing.title +
                                                   "</h1><div>This listing sold on a recent date.</div></body></html>"
                                              : "<html><body><h1>" + listing.title +
                                                   "</h1><div>This listing has ended.</div></body></html>"}});

    if (plan.device) {
      const auto& d = *plan.device;
      write_jsonl_line(labels, {{"mac", d.mac.canonical()}, {"model", plan.brand + " " + d.model}});
      if (plan.second_mac) write_jsonl_line(labels, {{"mac", plan.second_mac->canonical()}, {"model", plan.brand + " " + d.model}});

      const Centroid* seller_at = nullptr;
      const Centroid* buyer_at = nullptr;
      const auto& ca = grid.ca;
      if (d.category == Category::pre_only || d.category == Category::both) {
        seller_at = d.unresolvable ? &ca[rng.below(ca.size())] : d.match3 ? &home : &other_centroid(plan.country, plan.home);
      }
      if (d.category == Category::post_only) {
        buyer_at = d.unresolvable ? &ca[rng.below(ca.size())] : d.match3 ? &home : &other_centroid(plan.country, plan.home);
      } else if (d.category == Category::both) {
        if (!d.mover) {
          buyer_at = seller_at;
        } else {
          const auto& list = grid.of(plan.country);
          do buyer_at = &list[rng.below(list.size())];
          while (buyer_at == seller_at);
        }
      }
      if (seller_at) {
        const auto listed_day = utc_day(listing.listed_at);
        const auto n_obs = 1 + rng.below(3);
        std::set<std::uint64_t> offsets;
        while (offsets.size() < n_obs) offsets.insert(3 + rng.below(88));
        for (auto off = offsets.rbegin(); off != offsets.rend(); ++off) {
          const auto p = jittered(rng, seller_at->point);
          const auto at = start_of(listed_day - std::chrono::days{*off}) +
                          std::chrono::seconds{8 * 3600 + rng.below(12 * 3600)};
          write_jsonl_line(history, {{"bssid", d.mac.canonical()},
                                     {"lat", p.lat},
                                     {"lon", p.lon},
                                     {"accuracy_m", 20 + rng.below(60)},
                                     {"observed_at", timestamp_json(at)}});
        }
      }
      if (buyer_at) {
        const auto p = jittered(rng, buyer_at->point);
        write_jsonl_line(wps, {{"bssid", d.mac.canonical()},
                               {"windows",
                                {{{"from", timestamp_json(start_of(poll_start))},
                                  {"until", timestamp_json(start_of(poll_start + std::chrono::days{spec.poll_days}))},
                                  {"lat", p.lat},
                                  {"lon", p.lon},
                                  {"accuracy_m", 20 + rng.below(60)}}}}});
      }
    }
  }

  {
    auto oui = writer.open("oui.txt");
    oui << "# synthetic MA-L registry\n";
    for (const auto& [prefix, org] : registry) oui << format_oui(prefix, '\0') << ' ' << org << '\n';
  }
  {
    auto postal = writer.open("postal.jsonl");
    for (const auto* list : {&grid.us, &grid.gb, &grid.de, &grid.ca}) {
      for (const auto& c : *list) {
        write_jsonl_line(postal, {{"lat", c.point.lat}, {"lon", c.point.lon}, {"country", c.country}, {"postal_code", c.postal_code}});
      }
    }
  }
  {
    auto regions = writer.open("regions.jsonl");
    const auto a = grid.us[7].point;
    write_jsonl_line(regions, {{"name", "restricted-site-a"},
                               {"ring", {{a.lat - 0.05, a.lon - 0.05}, {a.lat - 0.05, a.lon + 0.05},
                                         {a.lat + 0.05, a.lon + 0.05}, {a.lat + 0.05, a.lon - 0.05}}}});
    const auto b = grid.gb[4].point;
    write_jsonl_line(regions, {{"name", "restricted-site-b"},
                               {"ring", {{b.lat - 0.04, b.lon}, {b.lat, b.lon + 0.06}, {b.lat + 0.05, b.lon + 0.02},
                                         {b.lat + 0.03, b.lon - 0.05}, {b.lat - 0.02, b.lon - 0.04}}}});
  }
  {
    auto out = writer.open("truth.json");
    out << Json{{"seed", seed}, {"spec", fixture_spec_to_json(spec)}, {"truth", truth_to_json(truth)}}.dump(2) << '\n';
  }
  for (auto* s : {&marketplace, &ocr, &wps, &history, &pages, &labels}) {
    s->flush();
    if (!*s) throw Error("failed writing fixtures in " + dir.string());
  }
  if (truth_out) *truth_out = truth;
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace mactrace
