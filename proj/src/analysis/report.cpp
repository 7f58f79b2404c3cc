#include "mactrace/analysis/report.hpp"

#include "mactrace/core/json.hpp"

namespace mactrace {

namespace {

Json rate_json(std::optional<double> rate) { return rate ? Json(*rate) : Json(nullptr); }

}  // namespace

void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf, const std::string& value_name, bool log_x) {
  if (log_x) out << "# x_scale=log\n";
  out << value_name << ",fraction\n";
  for (const auto& p : cdf) out << Json(p.value).dump() << ',' << Json(p.fraction).dump() << '\n';
}

void write_band_scatter_csv(std::ostream& out, std::span<const LabeledMac> labeled) {
  out << "byte4,byte5,model\n";
  for (const auto& item : labeled) {
    const auto& o = item.mac.octets();
    out << static_cast<int>(o[3]) << ',' << static_cast<int>(o[4]) << ',' << item.model << '\n';
  }
}

void write_exposure_table(std::ostream& out, const ExposureSummary& summary) {
  const auto& c = summary.counts;
  write_jsonl_line(out, {{"type", "categories"},
                         {"population", summary.population},
                         {"pre_only", c.pre_only},
                         {"post_only", c.post_only},
                         {"both", c.both},
                         {"never", c.never},
                         {"ties", c.ties}});
  for (const auto& row : summary.rows) {
    const auto& t = row.tally;
    write_jsonl_line(out, {{"type", "postal"},
                           {"category", to_string(row.category)},
                           {"side", to_string(row.side)},
                           {"country", row.country},
                           {"total", t.total},
                           {"match3", t.match3},
                           {"match2", t.match2},
                           {"mismatch", t.mismatch},
                           {"unresolvable", t.unresolvable},
                           {"match3_rate", rate_json(t.match3_rate())},
                           {"match2_or_better_rate", rate_json(t.match2_or_better_rate())}});
  }
}

void write_movement_table(std::ostream& out, const MovementReport& report) {
  write_jsonl_line(out, {{"type", "summary"},
                         {"threshold_km", report.threshold_km},
                         {"stationary", report.stationary},
                         {"moved", report.moved},
                         {"skipped", report.skipped},
                         {"stationary_fraction", report.stationary_fraction()}});
  for (const auto& m : report.entries) {
    write_jsonl_line(out, {{"type", "movement"},
                           {"bssid", m.bssid.canonical()},
                           {"listing_id", m.listing_id},
                           {"distance_km", m.distance_km},
                           {"moved", m.moved}});
  }
}

void write_mislabel_table(std::ostream& out, const MislabelReport& report) {
  write_jsonl_line(out, {{"type", "summary"},
                         {"flagged", report.flagged.size()},
                         {"new", report.new_count},
                         {"open_box", report.open_box_count},
                         {"open_box_share", rate_json(report.open_box_share())}});
  for (const auto& f : report.flagged) {
    write_jsonl_line(out, {{"type", "listing"},
                           {"listing_id", f.listing_id},
                           {"bssid", f.bssid.canonical()},
                           {"condition", to_string(f.condition)},
                           {"first_pre_auction", timestamp_json(f.first_pre_auction)}});
  }
}

void write_sensitive_table(std::ostream& out, const SensitiveReport& report) {
  write_jsonl_line(out, {{"type", "summary"},
                         {"hits", report.hits.size()},
                         {"distinct_bssids", report.distinct_bssids},
                         {"bssids_post_auction", report.bssids_post_auction}});
  for (const auto& h : report.hits) {
    write_jsonl_line(out, {{"type", "hit"},
                           {"bssid", h.bssid.canonical()},
                           {"listing_id", h.listing_id},
                           {"region", h.region},
                           {"pre_auction", h.pre_auction},
                           {"post_auction", h.post_auction}});
  }
}

}  // namespace mactrace
