// mactrace: command-line entry points for the pipeline stages.
//
// Exit codes: 0 success, 1 partial failure (some calls, images or queries failed, or the
// quota ran out), 2 usage error.

#include <unistd.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mactrace/analysis/bands.hpp"
#include "mactrace/analysis/exposure.hpp"
#include "mactrace/analysis/report.hpp"
#include "mactrace/core/json.hpp"
#include "mactrace/core/oui_registry.hpp"
#include "mactrace/extraction/extract.hpp"
#include "mactrace/extraction/ocr_backend.hpp"
#include "mactrace/fixtures/fixtures.hpp"
#include "mactrace/ingest/images.hpp"
#include "mactrace/ingest/ingest.hpp"
#include "mactrace/ingest/listing_store.hpp"
#include "mactrace/ingest/marketplace.hpp"
#include "mactrace/ingest/quota.hpp"
#include "mactrace/pipeline/stages.hpp"
#include "mactrace/planner/query_planner.hpp"
#include "mactrace/store/config.hpp"
#include "mactrace/store/journal.hpp"
#include "mactrace/store/manifest.hpp"
#include "mactrace/validation/validation.hpp"

namespace fs = std::filesystem;
using namespace mactrace;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

Timestamp now_utc() { return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()); }

struct Common {
  std::string store = "store";
  std::string config_file;
  Config config;
};

// Owns the manifest of one invocation and writes it on finish().
class Run {
 public:
  Run(const Common& common, std::string command, fs::path manifest_dir)
      : dir_(std::move(manifest_dir)) {
    manifest_.command = std::move(command);
    manifest_.started_at = now_utc();
    manifest_.run_id = make_run_id(manifest_.command, manifest_.started_at, static_cast<std::uint64_t>(::getpid()));
    manifest_.config = config_to_json(common.config);
  }

  RunManifest& manifest() { return manifest_; }

  void output_file(const fs::path& path) { manifest_.output_files.push_back(path.string()); }

  int finish(int code) {
    manifest_.exit_code = code;
    manifest_.finished_at = now_utc();
    write_manifest(dir_, manifest_);
    return code;
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out{path, std::ios::binary | std::ios::trunc};
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// Writes to `path`, or to stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Run& run, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  auto out = open_out(path);
  fn(out);
  run.output_file(path);
}

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in{command};
  std::vector<std::string> argv;
  for (std::string word; in >> word;) argv.push_back(word);
  return argv;
}

// ---------------------------------------------------------------------------------------------
// plan

struct PlanArgs {
  std::vector<std::string> queries;
  std::int64_t cap = 0;
  int page_size = 0;
  std::string fixture;
  std::string probe_file;
  std::string out;
};

int cmd_plan(const Common& common, const PlanArgs& args) {
  Run run(common, "plan", common.store);
  const auto cap = args.cap > 0 ? args.cap : common.config.cap;
  const auto page_size = args.page_size > 0 ? args.page_size : common.config.page_size;
  const auto queries = args.queries.empty() ? default_general_queries() : args.queries;

  std::unique_ptr<FixtureMarketplace> fixture;
  if (!args.fixture.empty()) {
    const auto loaded = FixtureMarketplace::load(args.fixture, cap);
    fixture = std::make_unique<FixtureMarketplace>(loaded.items(), cap);
  }
  std::optional<ProbeResponse> canned;
  if (!args.probe_file.empty()) {
    std::ifstream in{args.probe_file};
    if (!in) throw UsageError("cannot read probe response " + args.probe_file);
    canned = probe_from_json(Json::parse(in));
  }

  QueryPlan plan;
  for (const auto& query : queries) {
    std::vector<FilterGroup> groups;
    if (fixture || canned) {
      QueryCall probe;
      probe.kind = QueryCall::Kind::probe;
      probe.query_text = query;
      probe.page_size = 1;
      const auto response = fixture ? fixture->probe(probe) : *canned;
      groups = pack_filters(response.brands, cap).groups;
    } else {
      // Without probe data the sweep is unpartitioned and reaches at most `cap` results.
      groups.push_back({{}, cap});
      std::cerr << "plan: no probe data for \"" << query << "\"; covering the first " << cap << " results only\n";
    }
    plan.append(build_exhaustive_plan(query, groups, cap, page_size));
  }

  const fs::path out = args.out.empty() ? fs::path(common.store) / "plan.jsonl" : fs::path(args.out);
  {
    auto stream = open_out(out);
    write_plan(stream, plan);
  }
  run.output_file(out);
  run.manifest().outputs["calls"] = static_cast<std::int64_t>(plan.calls.size());
  std::cout << "plan: " << plan.calls.size() << " calls written to " << out.string() << '\n';
  for (const auto& g : plan.non_exhaustive_groups) std::cout << "plan: group exceeds the cap: " << g << '\n';
  return run.finish(kOk);
}

// ---------------------------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string fixture;
  std::string replay;
  std::string record;
  std::string marketplace;
  std::vector<std::string> queries;
  bool incremental = false;
  std::string plan;
  std::size_t cursor = 0;
  std::int64_t daily_quota = 0;
  int page_size = 0;
  std::int64_t cap = 0;
  int image_size = 0;
  std::string image_format;
};

fs::path quota_path(const std::string& store) { return fs::path(store) / "quota.json"; }

Quota load_quota(const std::string& store, std::int64_t limit) {
  QuotaState state;
  state.daily_limit = limit;
  if (std::ifstream in{quota_path(store)}; in) {
    const auto j = Json::parse(in);
    state.calls_today = j.at("calls_today").get<std::int64_t>();
    state.window_start = utc_day(parse_timestamp(j.at("window_start").get<std::string>()));
  }
  return Quota(state);
}

void save_quota(const std::string& store, const Quota& quota, Run& run) {
  const auto s = quota.state();
  auto out = open_out(quota_path(store));
  out << Json{{"calls_today", s.calls_today}, {"daily_limit", s.daily_limit}, {"window_start", format_date(s.window_start)}}.dump()
      << '\n';
  run.output_file(quota_path(store));
}

int cmd_ingest(Common common, const IngestArgs& args) {
  if (args.daily_quota > 0) common.config.daily_quota = args.daily_quota;
  if (args.page_size > 0) common.config.page_size = args.page_size;
  if (args.cap > 0) common.config.cap = args.cap;
  if (args.image_size > 0) common.config.image_size = args.image_size;
  if (!args.image_format.empty()) common.config.image_format = parse_image_format(args.image_format);
  validate(common.config);
  const auto& cfg = common.config;

  if (args.fixture.empty() == args.replay.empty()) throw UsageError("ingest needs exactly one of --fixture or --replay");

  Run run(common, "ingest", common.store);
  Store store(common.store);
  ListingStore listings(store.table(Store::kListings));

  std::unique_ptr<MarketplaceClient> source;
  if (!args.fixture.empty()) {
    auto all = FixtureMarketplace::load(args.fixture, cfg.cap);
    std::vector<FixtureMarketplace::Item> items;
    for (const auto& item : all.items()) {
      if (args.marketplace.empty() || item.listing.marketplace_id == args.marketplace) items.push_back(item);
    }
    source = std::make_unique<FixtureMarketplace>(std::move(items), cfg.cap);
  } else {
    source = std::make_unique<ReplayClient>(args.replay);
  }
  std::unique_ptr<RecordingClient> recorder;
  MarketplaceClient* client = source.get();
  if (!args.record.empty()) {
    recorder = std::make_unique<RecordingClient>(*source, args.record);
    client = recorder.get();
    run.output_file(args.record);
  }

  Quota quota = load_quota(common.store, cfg.daily_quota);
  ExecuteOptions options;
  options.workers = static_cast<std::size_t>(cfg.workers);

  IngestReport total;
  int code = kOk;
  const auto queries = args.queries.empty() ? default_general_queries() : args.queries;
  try {
    StageTimer timer(run.manifest(), "ingest");
    if (!args.plan.empty()) {
      std::ifstream in{args.plan};
      if (!in) throw UsageError("cannot read plan " + args.plan);
      options.start_cursor = args.cursor;
      total += execute_plan(read_plan(in), *client, quota, listings, options);
    } else if (args.incremental) {
      for (const auto& q : queries) total += incremental_query(q, *client, quota, listings, cfg.page_size, options).report;
    } else {
      for (std::size_t k = 0; k < queries.size(); ++k) {
        const auto& q = queries[k];
        if (!quota.try_consume(now_utc())) throw QuotaExhausted(0, {});
        QueryCall probe;
        probe.kind = QueryCall::Kind::probe;
        probe.query_text = q;
        probe.page_size = 1;
        const auto response = client->probe(probe);
        total.calls_made += 1;
        total.probe_calls += 1;
        const auto packed = pack_filters(response.brands, cfg.cap);
        const auto plan = build_exhaustive_plan(q, packed.groups, cfg.cap, cfg.page_size);
        const auto plan_file = fs::path(common.store) / ("plan-" + std::to_string(k) + ".jsonl");
        {
          auto out = open_out(plan_file);
          write_plan(out, plan);
        }
        run.output_file(plan_file);
        for (const auto& g : packed.non_exhaustive) std::cerr << "ingest: group exceeds the cap: " << g << '\n';
        options.start_cursor = 1;
        try {
          total += execute_plan(plan, *client, quota, listings, options);
        } catch (const QuotaExhausted& e) {
          total += e.report();
          std::cerr << "ingest: daily quota exhausted; resume with --plan " << plan_file.string() << " --cursor "
                    << e.cursor() << '\n';
          throw QuotaExhausted(e.cursor(), {});
        }
      }
    }
  } catch (const QuotaExhausted& e) {
    total += e.report();
    code = kPartial;
  }

  // Record the requested rendition on images not fetched yet.
  for (auto listing : listings.all()) {
    bool changed = false;
    for (auto& ref : listing.image_refs) {
      if (ref.local_path) continue;
      if (ref.requested_size_px != cfg.image_size || ref.format != cfg.image_format) {
        ref.requested_size_px = cfg.image_size;
        ref.format = cfg.image_format;
        changed = true;
      }
    }
    if (changed) listings.update(listing);
  }
  save_quota(common.store, quota, run);
  for (const auto& f : total.failed) std::cerr << "ingest: call " << f.index << " failed: " << f.message << '\n';
  if (!total.failed.empty()) code = kPartial;

  auto& m = run.manifest();
  m.outputs["new_listings"] = total.new_listings;
  m.outputs["duplicates"] = total.duplicates;
  m.inputs["listings_returned"] = total.listings_returned;
  m.inputs["api_calls"] = total.calls_made;
  m.outputs["stored_listings"] = static_cast<std::int64_t>(listings.size());
  run.output_file(store.table(Store::kListings).journal_path());
  std::cout << "ingest: " << total.new_listings << " new listings, " << total.duplicates << " duplicates, "
            << total.calls_made << " API calls, " << quota.remaining(now_utc()) << " calls left today\n";
  return run.finish(code);
}

// ---------------------------------------------------------------------------------------------
// fetch-images

struct FetchArgs {
  std::string source_dir;
  std::string images_dir;
  int image_size = 0;
  std::string image_format;
};

int cmd_fetch(Common common, const FetchArgs& args) {
  if (args.image_size > 0) common.config.image_size = args.image_size;
  if (!args.image_format.empty()) common.config.image_format = parse_image_format(args.image_format);
  validate(common.config);

  Run run(common, "fetch-images", common.store);
  Store store(common.store);
  DirectoryFetcher fetcher(args.source_dir);
  const fs::path images = args.images_dir.empty() ? fs::path(common.store) / "images" : fs::path(args.images_dir);
  FetchOptions options;
  options.size_px = common.config.image_size;
  options.format = common.config.image_format;

  FetchStageReport report;
  {
    StageTimer timer(run.manifest(), "fetch");
    report = fetch_stage(store, fetcher, images, options);
  }
  for (const auto& e : report.errors) std::cerr << "fetch-images: " << e << '\n';
  for (const auto& listing : stored_listings(store)) {
    for (const auto& ref : listing.image_refs) {
      if (ref.local_path) run.output_file(*ref.local_path);
    }
  }
  run.output_file(store.table(Store::kListings).journal_path());
  auto& m = run.manifest();
  m.inputs["listings"] = static_cast<std::int64_t>(report.listings);
  m.outputs["downloaded"] = static_cast<std::int64_t>(report.downloaded);
  m.outputs["skipped"] = static_cast<std::int64_t>(report.skipped);
  m.outputs["errors"] = static_cast<std::int64_t>(report.errors.size());
  std::cout << "fetch-images: " << report.downloaded << " downloaded, " << report.skipped << " already present, "
            << report.errors.size() << " errors\n";
  return run.finish(report.errors.empty() ? kOk : kPartial);
}

// ---------------------------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string registry;
  std::string backend;
  std::string fixture_ocr;
  bool no_segment = false;
  std::vector<int> rotations;
};

int cmd_extract(const Common& common, const ExtractArgs& args) {
  if (args.backend.empty() == args.fixture_ocr.empty()) throw UsageError("extract needs exactly one of --backend or --fixture-ocr");
  RunOptions options;
  options.segment = !args.no_segment;
  if (!args.rotations.empty()) {
    for (const int r : args.rotations) {
      if (r != 0 && r != 90 && r != 180 && r != 270) throw UsageError("rotations must be 0, 90, 180 or 270");
    }
    options.rotations = args.rotations;
  }

  Run run(common, "extract", common.store);
  Store store(common.store);
  const auto registry = load_oui_registry(args.registry);

  std::vector<std::unique_ptr<OcrBackend>> owned;
  const auto workers = static_cast<std::size_t>(common.config.workers);
  if (!args.backend.empty()) {
    const auto argv = split_command(args.backend);
    if (argv.empty()) throw UsageError("empty --backend command");
    for (std::size_t i = 0; i < workers; ++i) owned.push_back(std::make_unique<ProcessBackend>(argv));
  } else {
    owned.push_back(std::make_unique<FixtureBackend>(FixtureOcrEngine::load(args.fixture_ocr)));
  }
  std::vector<OcrBackend*> backends;
  for (auto& b : owned) backends.push_back(b.get());

  ExtractStageReport report;
  {
    StageTimer timer(run.manifest(), "extract");
    report = extract_stage(store, backends, registry, options);
  }
  run.output_file(store.table(Store::kExtractions).journal_path());
  run.output_file(store.table(Store::kCandidates).journal_path());
  auto& m = run.manifest();
  m.inputs["listings"] = static_cast<std::int64_t>(report.listings);
  m.inputs["images"] = static_cast<std::int64_t>(report.images);
  m.inputs["registry_prefixes"] = static_cast<std::int64_t>(registry.size());
  m.outputs["candidates"] = static_cast<std::int64_t>(report.candidates);
  m.outputs["valid_candidates"] = static_cast<std::int64_t>(report.valid_candidates);
  m.outputs["image_errors"] = static_cast<std::int64_t>(report.image_errors);
  std::cout << "extract: " << report.listings << " listings, " << report.images << " images, " << report.candidates
            << " candidates (" << report.valid_candidates << " with a registered OUI), " << report.image_errors
            << " image errors\n";
  return run.finish(report.image_errors == 0 ? kOk : kPartial);
}

// ---------------------------------------------------------------------------------------------
// geolocate

struct GeolocateArgs {
  std::string wps_fixture;
  std::string wps_replay;
  std::string history;
  std::string start;
  int days = 0;
};

int cmd_geolocate(const Common& common, const GeolocateArgs& args) {
  if (args.wps_fixture.empty() == args.wps_replay.empty()) {
    throw UsageError("geolocate needs exactly one of --wps-fixture or --wps-replay");
  }
  const int days = args.days > 0 ? args.days : common.config.poll_days;
  const Day first_day = args.start.empty() ? utc_day(now_utc()) : utc_day(parse_timestamp(args.start));

  Run run(common, "geolocate", common.store);
  Store store(common.store);
  std::unique_ptr<WpsClient> wps;
  if (!args.wps_fixture.empty()) {
    wps = std::make_unique<FixtureWps>(fs::path(args.wps_fixture));
  } else {
    wps = std::make_unique<ReplayWps>(args.wps_replay);
  }
  std::optional<fs::path> history;
  if (!args.history.empty()) history = args.history;

  GeolocateStageReport report;
  {
    StageTimer timer(run.manifest(), "geolocate");
    report = geolocate_stage(store, *wps, history, first_day, days);
  }
  for (const auto& f : report.poll.failures) {
    std::cerr << "geolocate: " << f.bssid.canonical() << " on " << format_date(f.day) << ": " << f.message << '\n';
  }
  run.output_file(store.table(Store::kObservations).journal_path());
  auto& m = run.manifest();
  m.inputs["bssids"] = static_cast<std::int64_t>(report.bssids);
  m.inputs["imported"] = static_cast<std::int64_t>(report.imported);
  m.outputs["queries"] = static_cast<std::int64_t>(report.poll.queries);
  m.outputs["found"] = static_cast<std::int64_t>(report.poll.found);
  m.outputs["not_found"] = static_cast<std::int64_t>(report.poll.not_found);
  m.outputs["failures"] = static_cast<std::int64_t>(report.poll.failures.size());
  std::cout << "geolocate: " << report.bssids << " BSSIDs, " << report.imported << " prior observations, "
            << report.poll.found << " found, " << report.poll.not_found << " not found, "
            << report.poll.failures.size() << " failed queries\n";
  return run.finish(report.poll.failures.empty() ? kOk : kPartial);
}

// ---------------------------------------------------------------------------------------------
// sold

int cmd_sold(const Common& common, const std::string& pages) {
  Run run(common, "sold", common.store);
  Store store(common.store);
  SoldStageReport report;
  {
    StageTimer timer(run.manifest(), "sold");
    report = sold_stage(store, pages);
  }
  run.output_file(store.table(Store::kListings).journal_path());
  auto& m = run.manifest();
  m.inputs["pages"] = static_cast<std::int64_t>(report.pages);
  m.outputs["sold"] = static_cast<std::int64_t>(report.sold);
  m.outputs["not_sold"] = static_cast<std::int64_t>(report.not_sold);
  m.outputs["unknown"] = static_cast<std::int64_t>(report.unknown);
  std::cout << "sold: " << report.sold << " sold, " << report.not_sold << " not sold, " << report.unknown
            << " unknown, " << report.unmatched << " pages without a stored listing\n";
  return run.finish(kOk);
}

// ---------------------------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string report;
  std::string out;
  std::string cdf;
  std::string scatter;
  std::string postal;
  std::string regions;
  std::string labels;
  std::string sold_filter;
  double stationary_km = 0;
  std::uint32_t band_gap = 0;
};

std::vector<LabeledMac> load_labels(const std::string& path) {
  std::vector<LabeledMac> out;
  read_jsonl(path, [&](const Json& j) { out.push_back({j.at("mac").get<MacAddress>(), j.at("model").get<std::string>()}); });
  return out;
}

int cmd_analyze(Common common, const AnalyzeArgs& args) {
  if (args.stationary_km > 0) common.config.stationary_km = args.stationary_km;
  if (args.band_gap > 0) common.config.band_gap = args.band_gap;
  validate(common.config);
  const auto& cfg = common.config;

  Run run(common, "analyze-" + args.report, common.store);
  Store store(common.store);
  auto& m = run.manifest();

  if (args.report == "exposure" || args.report == "categories") {
    const auto timelines = stored_timelines(store);
    const auto listings = listings_by_id(store);
    std::unique_ptr<PostalResolver> resolver;
    if (args.postal.empty()) {
      resolver = std::make_unique<TablePostalResolver>(std::vector<TablePostalResolver::Entry>{});
    } else {
      resolver = std::make_unique<TablePostalResolver>(TablePostalResolver::load(args.postal));
    }
    const auto summary = exposure_summary(timelines, listings, *resolver);
    emit(args.out, run, [&](std::ostream& out) { write_exposure_table(out, summary); });
    m.inputs["timelines"] = static_cast<std::int64_t>(timelines.size());
  } else if (args.report == "movement") {
    std::optional<SoldState> filter;
    if (!args.sold_filter.empty()) filter = parse_sold_state(args.sold_filter);
    const auto timelines = stored_timelines(store);
    const auto report = movement_report(timelines, sold_states(store), filter, cfg.stationary_km);
    emit(args.out, run, [&](std::ostream& out) { write_movement_table(out, report); });
    if (!args.cdf.empty()) emit(args.cdf, run, [&](std::ostream& out) { write_cdf_csv(out, report.cdf, "distance_km", true); });
    m.outputs["moved"] = static_cast<std::int64_t>(report.moved);
    m.outputs["stationary"] = static_cast<std::int64_t>(report.stationary);
  } else if (args.report == "mislabel") {
    const auto report = condition_mismatch(listings_by_id(store), stored_timelines(store));
    emit(args.out, run, [&](std::ostream& out) { write_mislabel_table(out, report); });
    m.outputs["flagged"] = static_cast<std::int64_t>(report.flagged.size());
  } else if (args.report == "sensitive") {
    if (args.regions.empty()) throw UsageError("--report sensitive needs --regions");
    const auto regions = load_regions(args.regions);
    const auto report = sensitive_hits(stored_timelines(store), regions);
    emit(args.out, run, [&](std::ostream& out) { write_sensitive_table(out, report); });
    m.outputs["hits"] = static_cast<std::int64_t>(report.hits.size());
  } else if (args.report == "bands") {
    if (args.labels.empty()) throw UsageError("--report bands needs --labels");
    const auto labeled = load_labels(args.labels);
    emit(args.out, run, [&](std::ostream& out) {
      if (labeled.empty()) return;
      const auto index = build_model_bands(labeled, cfg.band_gap);
      for (const auto& [oui, models] : index.by_oui) {
        for (const auto& bands : models) {
          for (const auto& iv : bands.intervals) {
            write_jsonl_line(out, {{"type", "band"},
                                   {"oui", format_oui(oui)},
                                   {"model", bands.model},
                                   {"lo", iv.lo},
                                   {"hi", iv.hi},
                                   {"support", iv.support}});
          }
        }
      }
      for (const auto& c : stored_candidates(store)) {
        if (!c.oui_valid) continue;
        Json guesses = Json::array();
        for (const auto& g : infer_model(c.mac, index)) guesses.push_back({{"model", g.model}, {"support", g.support}});
        write_jsonl_line(out, {{"type", "inference"}, {"mac", c.mac.canonical()}, {"listing_id", c.listing_id}, {"guesses", guesses}});
      }
    });
    if (!args.scatter.empty()) emit(args.scatter, run, [&](std::ostream& out) { write_band_scatter_csv(out, labeled); });
    m.inputs["labeled"] = static_cast<std::int64_t>(labeled.size());
  } else if (args.report == "timeline") {
    TimelineStore timelines(store.table(Store::kObservations));
    const auto stats = timeline_stats(timelines);
    emit(args.out, run, [&](std::ostream& out) {
      write_jsonl_line(out, {{"type", "summary"},
                             {"bssids", stats.per_bssid.size()},
                             {"median_days", stats.median_days},
                             {"median_span", stats.median_span}});
      for (const auto& s : stats.per_bssid) {
        write_jsonl_line(out, {{"type", "bssid"}, {"bssid", s.bssid.canonical()}, {"days_observed", s.days_observed}, {"span_days", s.span_days}});
      }
    });
    if (!args.cdf.empty()) emit(args.cdf, run, [&](std::ostream& out) { write_cdf_csv(out, stats.days_cdf, "days_observed"); });
  } else {
    throw UsageError("unknown report: " + args.report);
  }
  return run.finish(kOk);
}

// ---------------------------------------------------------------------------------------------
// validate

struct SampleArgs {
  std::size_t n = 250;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

void write_worklist(std::ostream& out, std::span<const WorkItem> worklist) {
  for (const auto& w : worklist) write_jsonl_line(out, {{"image_id", w.image_id}, {"partition", to_string(w.partition)}});
}

std::vector<WorkItem> read_worklist(const std::string& path) {
  std::vector<WorkItem> out;
  read_jsonl(path, [&](const Json& j) {
    const auto p = j.at("partition").get<std::string>();
    const Partition partition = p == "P1" ? Partition::p1 : p == "P2" ? Partition::p2 : p == "P3" ? Partition::p3
                                                                                                 : throw InvalidRecord("unknown partition " + p);
    out.push_back({j.at("image_id").get<std::string>(), partition});
  });
  return out;
}

int cmd_validate_sample(const Common& common, const SampleArgs& args) {
  Run run(common, "validate-sample", common.store);
  Store store(common.store);
  const auto seed = args.seed_set ? args.seed : common.config.seed;
  run.manifest().seeds["sample"] = seed;
  const auto results = image_results(store);
  const auto partitions = partition_images(results);
  const auto worklist = sample_for_annotation(partitions, args.n, seed);
  const fs::path out = args.out.empty() ? fs::path(common.store) / "worklist.jsonl" : fs::path(args.out);
  {
    auto stream = open_out(out);
    write_worklist(stream, worklist);
  }
  run.output_file(out);
  for (std::size_t p = 0; p < kPartitionCount; ++p) {
    run.manifest().inputs[std::string(to_string(static_cast<Partition>(p)))] = static_cast<std::int64_t>(partitions[p].size());
  }
  run.manifest().outputs["worklist"] = static_cast<std::int64_t>(worklist.size());
  std::cout << "validate: " << worklist.size() << " images written to " << out.string() << '\n';
  return run.finish(kOk);
}

struct ScoreArgs {
  std::string worklist;
  std::string annotations;
  std::string out;
};

int cmd_validate_score(const Common& common, const ScoreArgs& args) {
  Run run(common, "validate-score", common.store);
  Store store(common.store);
  const auto results = image_results(store);
  const auto worklist = read_worklist(args.worklist);
  const auto annotations = read_annotations(args.annotations);
  const auto report = evaluate(worklist, results, annotations, partition_weights(results));
  emit(args.out, run, [&](std::ostream& out) { write_metrics_csv(out, report); });
  run.manifest().inputs["worklist"] = static_cast<std::int64_t>(worklist.size());
  run.manifest().inputs["annotations"] = static_cast<std::int64_t>(annotations.size());
  run.manifest().outputs["missing_annotations"] = static_cast<std::int64_t>(report.missing_annotations);
  if (report.missing_annotations > 0) {
    std::cerr << "validate: " << report.missing_annotations << " worklist images lack two reviewers\n";
  }
  return run.finish(report.missing_annotations == 0 ? kOk : kPartial);
}

// ---------------------------------------------------------------------------------------------
// fixtures

struct FixtureArgs {
  std::uint64_t seed = 1;
  std::string out = "fixtures";
  std::string spec_file;
  std::size_t n_listings = 0;
  std::optional<double> mac_density;
  std::optional<double> mover_fraction;
  std::optional<double> match3_pre;
  std::optional<double> match3_post;
};

int cmd_fixtures(const Common& common, const FixtureArgs& args) {
  FixtureSpec spec;
  if (!args.spec_file.empty()) {
    std::ifstream in{args.spec_file};
    if (!in) throw UsageError("cannot read fixture spec " + args.spec_file);
    spec = fixture_spec_from_json(Json::parse(in));
  }
  if (args.n_listings > 0) spec.n_listings = args.n_listings;
  if (args.mac_density) spec.mac_density = *args.mac_density;
  if (args.mover_fraction) spec.mover_fraction = *args.mover_fraction;
  if (args.match3_pre) spec.match3_rate_pre = *args.match3_pre;
  if (args.match3_post) spec.match3_rate_post = *args.match3_post;
  try {
    validate(spec);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  Run run(common, "fixtures", args.out);
  run.manifest().seeds["fixtures"] = args.seed;
  FixtureTruth truth;
  std::vector<std::string> files;
  {
    StageTimer timer(run.manifest(), "generate");
    files = generate_fixtures(args.seed, spec, args.out, &truth);
  }
  for (const auto& f : files) run.output_file(fs::path(args.out) / f);
  run.manifest().outputs["listings"] = static_cast<std::int64_t>(truth.listings);
  run.manifest().outputs["mac_listings"] = static_cast<std::int64_t>(truth.mac_listings);
  std::cout << "fixtures: " << truth.listings << " listings (" << truth.mac_listings << " showing an address) in "
            << args.out << '\n';
  return run.finish(kOk);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mactrace: marketplace Wi-Fi address exposure pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Common common;
  app.add_option("--store,--out-dir", common.store, "Store directory")->capture_default_str();
  app.add_option("--config", common.config_file, "JSON config file");

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Write an exhaustive query plan");
  plan->add_option("--query", plan_args.queries, "Query text (repeatable)");
  plan->add_option("--cap", plan_args.cap, "Results cap per query")->check(CLI::PositiveNumber);
  plan->add_option("--page-size", plan_args.page_size, "Results per page")->check(CLI::Range(1, 200));
  plan->add_option("--fixture", plan_args.fixture, "Probe a fixture marketplace file")->check(CLI::ExistingFile);
  plan->add_option("--probe-response", plan_args.probe_file, "Canned probe response JSON")->check(CLI::ExistingFile);
  plan->add_option("--out", plan_args.out, "Plan file (default <store>/plan.jsonl)");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Retrieve listings into the store");
  ingest->add_option("--fixture", ingest_args.fixture, "Fixture marketplace file")->check(CLI::ExistingFile);
  ingest->add_option("--replay", ingest_args.replay, "Recorded API responses")->check(CLI::ExistingFile);
  ingest->add_option("--record", ingest_args.record, "Record API responses to this file");
  ingest->add_option("--marketplace", ingest_args.marketplace, "Marketplace id, e.g. EBAY_US");
  ingest->add_option("--query", ingest_args.queries, "Query text (repeatable)");
  ingest->add_flag("--incremental", ingest_args.incremental, "Newly-listed pass down to the newest stored listing");
  ingest->add_option("--plan", ingest_args.plan, "Execute a saved plan")->check(CLI::ExistingFile);
  ingest->add_option("--cursor", ingest_args.cursor, "First plan call to execute");
  ingest->add_option("--daily-quota", ingest_args.daily_quota, "API calls per UTC day")->check(CLI::PositiveNumber);
  ingest->add_option("--page-size", ingest_args.page_size, "Results per page")->check(CLI::Range(1, 200));
  ingest->add_option("--cap", ingest_args.cap, "Results cap per query")->check(CLI::PositiveNumber);
  ingest->add_option("--image-size", ingest_args.image_size, "Requested image size in pixels")
      ->check(CLI::Range(kMinImageSizePx, kMaxImageSizePx));
  ingest->add_option("--image-format", ingest_args.image_format, "jpeg, png or webp")
      ->check(CLI::IsMember({"jpeg", "png", "webp"}));

  FetchArgs fetch_args;
  auto* fetch = app.add_subcommand("fetch-images", "Download listing images");
  fetch->add_option("--source", fetch_args.source_dir, "Directory serving <image_id>.<ext>")
      ->required()
      ->check(CLI::ExistingDirectory);
  fetch->add_option("--images-dir", fetch_args.images_dir, "Destination (default <store>/images)");
  fetch->add_option("--image-size", fetch_args.image_size, "Image size in pixels")->check(CLI::Range(kMinImageSizePx, kMaxImageSizePx));
  fetch->add_option("--image-format", fetch_args.image_format, "jpeg, png or webp")->check(CLI::IsMember({"jpeg", "png", "webp"}));

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "OCR images and extract address candidates");
  extract->add_option("--registry", extract_args.registry, "OUI registry (.csv IEEE export or hex/name lines)")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("--backend", extract_args.backend, "OCR backend command line");
  extract->add_option("--fixture-ocr", extract_args.fixture_ocr, "In-process fixture OCR text")->check(CLI::ExistingFile);
  extract->add_flag("--no-segment", extract_args.no_segment, "OCR whole images");
  extract->add_option("--rotations", extract_args.rotations, "Rotations to try")->delimiter(',');

  GeolocateArgs geo_args;
  auto* geolocate = app.add_subcommand("geolocate", "Poll the positioning service for extracted addresses");
  geolocate->add_option("--wps-fixture", geo_args.wps_fixture, "WPS availability windows")->check(CLI::ExistingFile);
  geolocate->add_option("--wps-replay", geo_args.wps_replay, "Recorded WPS replies")->check(CLI::ExistingFile);
  geolocate->add_option("--history", geo_args.history, "Prior observations to import")->check(CLI::ExistingFile);
  geolocate->add_option("--start", geo_args.start, "First polling day, YYYY-MM-DD (default today)");
  geolocate->add_option("--days", geo_args.days, "Polling days")->check(CLI::PositiveNumber);

  std::string pages;
  auto* sold = app.add_subcommand("sold", "Detect sold listings from saved listing pages");
  sold->add_option("--pages", pages, "Listing pages, {listing_id, status, body} per line")->required()->check(CLI::ExistingFile);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Write report tables and plot series");
  analyze->add_option("--report", analyze_args.report, "Report kind")
      ->required()
      ->check(CLI::IsMember({"exposure", "categories", "movement", "mislabel", "sensitive", "bands", "timeline"}));
  analyze->add_option("--out", analyze_args.out, "Table output (default stdout)");
  analyze->add_option("--cdf", analyze_args.cdf, "CDF series CSV (movement, timeline)");
  analyze->add_option("--scatter", analyze_args.scatter, "Band scatter CSV (bands)");
  analyze->add_option("--postal", analyze_args.postal, "Postal centroid table (exposure)")->check(CLI::ExistingFile);
  analyze->add_option("--regions", analyze_args.regions, "Sensitive regions (sensitive)")->check(CLI::ExistingFile);
  analyze->add_option("--labels", analyze_args.labels, "Labeled addresses (bands)")->check(CLI::ExistingFile);
  analyze->add_option("--sold-filter", analyze_args.sold_filter, "Restrict movement to a sold state")
      ->check(CLI::IsMember({"sold", "not_sold", "unknown"}));
  analyze->add_option("--stationary-km", analyze_args.stationary_km, "Movement threshold")->check(CLI::PositiveNumber);
  analyze->add_option("--band-gap", analyze_args.band_gap, "Band coalescing gap")->check(CLI::Range(1, 65535));

  auto* validate_cmd = app.add_subcommand("validate", "Annotation-based validation harness");
  validate_cmd->require_subcommand(1);
  SampleArgs sample_args;
  auto* sample = validate_cmd->add_subcommand("sample", "Draw the annotation worklist");
  sample->add_option("--n", sample_args.n, "Images per partition")->check(CLI::PositiveNumber);
  auto* seed_opt = sample->add_option("--seed", sample_args.seed, "Sampling seed (default: config seed)");
  sample->add_option("--out", sample_args.out, "Worklist file (default <store>/worklist.jsonl)");
  ScoreArgs score_args;
  auto* score = validate_cmd->add_subcommand("score", "Score annotations against pipeline results");
  score->add_option("--worklist", score_args.worklist, "Worklist file")->required()->check(CLI::ExistingFile);
  score->add_option("--annotations", score_args.annotations, "Annotation records")->required()->check(CLI::ExistingFile);
  score->add_option("--out", score_args.out, "Metrics CSV (default stdout)");

  FixtureArgs fixture_args;
  auto* fixtures = app.add_subcommand("fixtures", "Generate a synthetic marketplace, WPS and OCR data set");
  fixtures->add_option("--seed", fixture_args.seed, "Generator seed")->capture_default_str();
  fixtures->add_option("--out", fixture_args.out, "Output directory")->capture_default_str();
  fixtures->add_option("--spec", fixture_args.spec_file, "Fixture spec JSON")->check(CLI::ExistingFile);
  fixtures->add_option("--n-listings", fixture_args.n_listings, "Listings")->check(CLI::PositiveNumber);
  fixtures->add_option("--mac-density", fixture_args.mac_density, "Share of listings showing an address")->check(CLI::Range(0.0, 1.0));
  fixtures->add_option("--mover-fraction", fixture_args.mover_fraction, "Share of moved devices")->check(CLI::Range(0.0, 1.0));
  fixtures->add_option("--match3-pre", fixture_args.match3_pre, "Seller prefix match rate")->check(CLI::Range(0.0, 1.0));
  fixtures->add_option("--match3-post", fixture_args.match3_post, "Buyer prefix match rate")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  sample_args.seed_set = seed_opt->count() > 0;

  try {
    std::optional<fs::path> config_file;
    if (!common.config_file.empty()) config_file = common.config_file;
    common.config = load_config(config_file);

    if (*plan) return cmd_plan(common, plan_args);
    if (*ingest) return cmd_ingest(common, ingest_args);
    if (*fetch) return cmd_fetch(common, fetch_args);
    if (*extract) return cmd_extract(common, extract_args);
    if (*geolocate) return cmd_geolocate(common, geo_args);
    if (*sold) return cmd_sold(common, pages);
    if (*analyze) return cmd_analyze(common, analyze_args);
    if (*sample) return cmd_validate_sample(common, sample_args);
    if (*score) return cmd_validate_score(common, score_args);
    if (*fixtures) return cmd_fixtures(common, fixture_args);
  } catch (const UsageError& e) {
    std::cerr << "mactrace: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "mactrace: " << e.what() << '\n';
    return kUsage;
  } catch (const PlanError& e) {
    std::cerr << "mactrace: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "mactrace: " << e.what() << '\n';
    return kPartial;
  }
  return kUsage;
}
