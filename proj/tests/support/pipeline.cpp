#include "pipeline.hpp"

#include "mactrace/ingest/ingest.hpp"

namespace mactrace::test {

PipelineRun run_fixture_pipeline(const std::filesystem::path& fixtures, const std::filesystem::path& store_dir,
                                 const FixtureTruth& truth, const FixtureSpec& spec, OcrBackend& backend) {
  Store store(store_dir);
  PipelineRun run;

  auto market = FixtureMarketplace::load(fixtures / "marketplace.jsonl");
  ListingStore listings(store.table(Store::kListings));
  Quota quota;
  for (const auto& q : default_general_queries()) exhaustive_query(q, market, quota, listings);
  run.listings = listings.size();

  DirectoryFetcher fetcher(fixtures / "images");
  fetch_stage(store, fetcher, store_dir / "images");

  const auto registry = load_oui_registry(fixtures / "oui.txt", RegistryFormat::line_pairs);
  std::vector<OcrBackend*> backends{&backend};
  run.extract = extract_stage(store, backends, registry);

  FixtureWps wps(fixtures / "wps.jsonl");
  run.geolocate = geolocate_stage(store, wps, fixtures / "history.jsonl", utc_day(parse_timestamp(truth.poll_start)),
                                  spec.poll_days);
  run.sold = sold_stage(store, fixtures / "pages.jsonl");

  auto resolver = TablePostalResolver::load(fixtures / "postal.jsonl");
  const auto timelines = stored_timelines(store);
  run.exposure = exposure_summary(timelines, listings_by_id(store), resolver);
  return run;
}

}  // namespace mactrace::test
