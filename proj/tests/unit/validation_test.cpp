#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "mactrace/core/random.hpp"
#include "mactrace/validation/validation.hpp"
#include "oracles.hpp"

using namespace mactrace;

namespace {

const ConfusionCounts kP1{150, 60, 22, 63};
const ConfusionCounts kP2{0, 0, 2, 245};
const ConfusionCounts kP3{0, 0, 2, 238};
const PartitionWeights kWeights{0.088, 0.338, 0.574};

MacAddress m(std::uint64_t v) { return MacAddress::from_value(0x00180a000000ULL + v); }

PartitionedImages synthetic_partitions(std::size_t per_partition) {
  PartitionedImages p;
  for (std::size_t k = 0; k < kPartitionCount; ++k) {
    for (std::size_t i = 0; i < per_partition; ++i) p[k].push_back("p" + std::to_string(k) + "-" + std::to_string(i));
  }
  return p;
}

AnnotationRecord note(const std::string& image, const std::string& reviewer, std::set<MacAddress> macs,
                      std::set<AnnotationFlag> flags = {}) {
  return {image, reviewer, std::move(macs), std::move(flags)};
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("partition rules") {
  CHECK(partition_of(1, 0) == Partition::p1);
  CHECK(partition_of(ImageResult{"a", 1, 40, {}}) == Partition::p1);  // candidate with an unregistered OUI
  CHECK(partition_of(0, 7) == Partition::p2);
  CHECK(partition_of(0, 10) == Partition::p2);
  CHECK(partition_of(0, 11) == Partition::p3);
  CHECK(partition_of(0, 30) == Partition::p3);
  CHECK(to_string(Partition::p2) == "P2");

  Rng rng(1);
  std::vector<ImageResult> images;
  for (int i = 0; i < 500; ++i) images.push_back({"i" + std::to_string(i), rng.below(3), rng.below(30), {}});
  images.push_back(images.front());
  const auto parts = partition_images(images);
  std::size_t total = 0;
  for (const auto& p : parts) {
    total += p.size();
    CHECK(std::is_sorted(p.begin(), p.end()));
  }
  CHECK(total == 500);
}

TEST_CASE("sampling is deterministic and order independent") {
  auto parts = synthetic_partitions(400);
  const auto a = sample_for_annotation(parts, 250, 2024);
  CHECK(a.size() == 750);
  CHECK(sample_for_annotation(parts, 250, 2024) == a);
  for (auto& p : parts) std::reverse(p.begin(), p.end());
  CHECK(sample_for_annotation(parts, 250, 2024) == a);
  CHECK(sample_for_annotation(parts, 250, 2025) != a);

  std::array<std::size_t, kPartitionCount> per{};
  std::set<std::string> ids;
  for (const auto& item : a) {
    ++per[static_cast<std::size_t>(item.partition)];
    ids.insert(item.image_id);
    CHECK(item.image_id.substr(0, 2) == "p" + std::to_string(static_cast<int>(item.partition)));
  }
  CHECK(per == std::array<std::size_t, kPartitionCount>{250, 250, 250});
  CHECK(ids.size() == 750);
  // Mixed order: the first 250 are not all from one partition.
  CHECK(std::any_of(a.begin(), a.begin() + 250, [&](const WorkItem& w) { return w.partition != a[0].partition; }));

  auto small = synthetic_partitions(250);
  small[1].resize(100);
  CHECK_THROWS_AS(sample_for_annotation(small, 250, 1), InsufficientImages);
}

TEST_CASE("ground truth from two reviewers") {
  std::vector<AnnotationRecord> same{note("i", "1", {m(1)}), note("i", "2", {m(1)})};
  auto gt = resolve_ground_truth(same, true);
  CHECK(gt.accepted == std::set<MacAddress>{m(1)});
  CHECK_FALSE(gt.inconclusive);

  std::vector<AnnotationRecord> split{note("i", "1", {m(1)}), note("i", "2", {m(2)})};
  CHECK(resolve_ground_truth(split, true).inconclusive);
  CHECK_FALSE(resolve_ground_truth(split, false).inconclusive);

  std::vector<AnnotationRecord> empty{note("i", "1", {}), note("i", "2", {})};
  gt = resolve_ground_truth(empty, true);
  CHECK(gt.accepted.empty());
  CHECK_FALSE(gt.inconclusive);

  std::vector<AnnotationRecord> ordered{note("i", "10", {}), note("i", "9", {m(1)}), note("i", "2", {m(1)})};
  gt = resolve_ground_truth(ordered, false);
  CHECK(gt.reviewers == std::array<std::string, 2>{"2", "9"});
  CHECK(gt.accepted.size() == 1);

  CHECK_THROWS_AS(resolve_ground_truth(std::vector<AnnotationRecord>{note("i", "1", {})}, true), TooFewReviewers);
  CHECK(reviewer_less("2", "10"));
  CHECK(reviewer_less("10", "a"));
  CHECK(reviewer_less("a", "b"));
}

TEST_CASE("placeholder entries become a flag") {
  const auto r = annotation_from_json({{"image_id", "i"}, {"reviewer_id", "1"},
                                       {"macs", {"a0:2b:ca:??:1c:da", "A0-2B-CA-92-1C-DA"}}, {"flags", Json::array()}});
  CHECK(r.macs == std::set<MacAddress>{parse_mac("a02bca921cda")});
  CHECK(r.flags.count(AnnotationFlag::placeholder) == 1);
  CHECK(annotation_from_json(annotation_to_json(r)) == r);
  CHECK(parse_annotation_flag("redacted") == AnnotationFlag::redacted);
}

TEST_CASE("classify examples") {
  CHECK(classify({m(1), m(2)}, {m(1)}) == ConfusionCounts{1, 1, 0, 0});
  CHECK(classify({}, {}) == ConfusionCounts{0, 0, 0, 1});
  CHECK(classify({}, {m(1)}) == ConfusionCounts{0, 0, 1, 0});
  CHECK(classify({m(3)}, {}) == ConfusionCounts{0, 1, 0, 0});
}

TEST_CASE("per-image contributions") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::set<MacAddress> pipeline;
    std::set<MacAddress> accepted;
    for (auto k = rng.below(4); k > 0; --k) pipeline.insert(m(rng.below(6)));
    for (auto k = rng.below(4); k > 0; --k) accepted.insert(m(rng.below(6)));
    const auto c = classify(pipeline, accepted);
    CHECK(c.tp + c.fn == accepted.size());
    CHECK(c.tp + c.fp == pipeline.size());
    CHECK(c.tn <= 1);
    CHECK((c.tn == 1) == (pipeline.empty() && accepted.empty()));
  }
}

TEST_CASE("table metrics") {
  ConfusionCounts total = kP1;
  total += kP2;
  total += kP3;
  CHECK(total == ConfusionCounts{150, 60, 26, 546});
  const auto t = metrics(total);
  CHECK(*t.accuracy == Ratio{348, 391});  // 696/782
  CHECK(t.accuracy->value() == doctest::Approx(0.890).epsilon(0.001));
  CHECK(t.precision->value() == doctest::Approx(0.714).epsilon(0.005));
  CHECK(t.false_positive_rate->value() == doctest::Approx(0.099).epsilon(0.005));

  CHECK(*metrics(kP1).accuracy == make_ratio(213, 295));
  CHECK(*metrics(kP2).accuracy == make_ratio(245, 247));
  CHECK(*metrics(kP3).accuracy == make_ratio(238, 240));
  CHECK_FALSE(metrics(kP2).precision.has_value());

  const auto w = weighted_accuracy({kP1, kP2, kP3}, kWeights);
  CHECK(*w.by_counts == doctest::Approx(0.963).epsilon(0.0005));
  CHECK(*w.by_accuracy == doctest::Approx(0.968).epsilon(0.0005));

  const auto zero = metrics(ConfusionCounts{});
  CHECK_FALSE(zero.accuracy.has_value());
  CHECK_FALSE(zero.false_positive_rate.has_value());
  CHECK_THROWS_AS(make_ratio(1, 0), DegenerateDenominator);
  CHECK(make_ratio(6, 8) == Ratio{3, 4});
}

TEST_CASE("weights follow population shares") {
  std::vector<ImageResult> images;
  for (int i = 0; i < 88; ++i) images.push_back({"a" + std::to_string(i), 1, 0, {}});
  for (int i = 0; i < 338; ++i) images.push_back({"b" + std::to_string(i), 0, 3, {}});
  for (int i = 0; i < 574; ++i) images.push_back({"c" + std::to_string(i), 0, 30, {}});
  const auto w = partition_weights(images);
  CHECK(w[0] == doctest::Approx(0.088));
  CHECK(w[1] == doctest::Approx(0.338));
  CHECK(w[2] == doctest::Approx(0.574));
}

TEST_CASE("constructed annotation set") {
  const auto s = test::constructed_validation_set();
  const auto report = evaluate(s.worklist, s.results, s.annotations, kWeights);
  for (std::size_t p = 0; p < kPartitionCount; ++p) {
    CAPTURE(p);
    CHECK(report.counts[p] == s.expected_counts[p]);
    CHECK(report.inconclusive[p] == s.expected_inconclusive[p]);
    CHECK(report.annotated[p] == s.expected_annotated[p]);
  }
  CHECK(report.missing_annotations == s.expected_missing);

  std::ostringstream csv;
  write_metrics_csv(csv, report);
  const auto text = csv.str();
  CHECK(text.rfind("partition,tp,fp,fn,tn,inconclusive,accuracy,precision,fpr\n", 0) == 0);
  CHECK(text.find("\nP1,4,4,2,1,3,") != std::string::npos);
  CHECK(text.find("\nTotal,4,4,5,7,3,") != std::string::npos);
}

}  // TEST_SUITE
