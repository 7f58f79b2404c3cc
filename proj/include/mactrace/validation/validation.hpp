#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mactrace/core/json.hpp"
#include "mactrace/core/mac_address.hpp"

namespace mactrace {

class InsufficientImages : public Error {
 public:
  using Error::Error;
};

class TooFewReviewers : public Error {
 public:
  using Error::Error;
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

// P1: at least one candidate. P2: none and at most 10 OCR words. P3: none and more words.
enum class Partition { p1 = 0, p2 = 1, p3 = 2 };
inline constexpr std::size_t kPartitionCount = 3;
inline constexpr std::size_t kSparseTextWords = 10;

std::string_view to_string(Partition partition);

struct ImageResult {
  std::string image_id;
  std::size_t candidate_count = 0;  // any OUI
  std::size_t ocr_words = 0;
  std::set<MacAddress> valid_macs;  // candidates with a registered OUI
};

Partition partition_of(std::size_t candidate_count, std::size_t ocr_words);
Partition partition_of(const ImageResult& image);

using PartitionedImages = std::array<std::vector<std::string>, kPartitionCount>;

// Image ids per partition, sorted and deduplicated.
PartitionedImages partition_images(std::span<const ImageResult> images);

struct WorkItem {
  std::string image_id;
  Partition partition = Partition::p1;
  bool operator==(const WorkItem&) const = default;
};

/// Draws n images from every partition and interleaves the draws into one shuffled worklist.
/// Depends only on the seed and the id sets, not on their input order. Throws
/// InsufficientImages when a partition holds fewer than n images.
std::vector<WorkItem> sample_for_annotation(const PartitionedImages& partitions, std::size_t n_per_partition,
                                            std::uint64_t seed);

enum class AnnotationFlag { redacted, placeholder, uncertain };

std::string_view to_string(AnnotationFlag flag);
AnnotationFlag parse_annotation_flag(std::string_view text);

struct AnnotationRecord {
  std::string image_id;
  std::string reviewer_id;
  std::set<MacAddress> macs;
  std::set<AnnotationFlag> flags;
  bool operator==(const AnnotationRecord&) const = default;
};

// Entries in "macs" that do not parse (e.g. "a0:2b:ca:??:1c:da") become a placeholder flag.
AnnotationRecord annotation_from_json(const Json& j);
Json annotation_to_json(const AnnotationRecord& record);
std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records);

// Numeric order when both ids are all digits, otherwise lexicographic.
bool reviewer_less(const std::string& a, const std::string& b);

struct GroundTruth {
  std::string image_id;
  std::set<MacAddress> accepted;
  bool inconclusive = false;
  std::array<std::string, 2> reviewers;
};

/// Uses the first two distinct reviewers by reviewer order; accepted is the intersection of
/// their address sets. Inconclusive when the pipeline had candidates, nothing was accepted,
/// and at least one of the two reviewers recorded an address or a placeholder.
GroundTruth resolve_ground_truth(std::span<const AnnotationRecord> annotations, bool pipeline_had_candidates);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts classify(const std::set<MacAddress>& pipeline_valid, const std::set<MacAddress>& accepted);

// Reduced non-negative fraction.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Ratio&) const = default;
};

// Throws DegenerateDenominator when den is zero.
Ratio make_ratio(std::uint64_t num, std::uint64_t den);

// Undefined metrics (zero denominator) are nullopt.
struct Metrics {
  std::optional<Ratio> accuracy;
  std::optional<Ratio> precision;
  std::optional<Ratio> false_positive_rate;
};

Metrics metrics(const ConfusionCounts& counts);

// Population shares of P1, P2, P3 among all processed images.
using PartitionWeights = std::array<double, kPartitionCount>;

PartitionWeights partition_weights(std::span<const ImageResult> images);

/// by_accuracy = sum_p w_p * accuracy_p.
/// by_counts = sum_p w_p * (tp_p + tn_p) / sum_p w_p * total_p, which reweights each
/// partition's sample to its population share before pooling.
struct WeightedAccuracy {
  std::optional<double> by_accuracy;
  std::optional<double> by_counts;
};

WeightedAccuracy weighted_accuracy(const std::array<ConfusionCounts, kPartitionCount>& per_partition,
                                   const PartitionWeights& weights);

struct ValidationReport {
  std::array<ConfusionCounts, kPartitionCount> counts{};
  std::array<std::size_t, kPartitionCount> inconclusive{};
  std::array<std::size_t, kPartitionCount> annotated{};
  std::size_t missing_annotations = 0;  // worklist images with fewer than two reviewers
  PartitionWeights weights{};
  ConfusionCounts total() const;
  WeightedAccuracy weighted() const;
};

/// Scores every worklist image that has two reviewers against the pipeline result for it.
/// Worklist images absent from `results` are scored as having no candidates.
ValidationReport evaluate(std::span<const WorkItem> worklist, std::span<const ImageResult> results,
                          std::span<const AnnotationRecord> annotations, const PartitionWeights& weights);

// partition,tp,fp,fn,tn,inconclusive,accuracy,precision,fpr rows for P1..P3 and Total, then
// the two weighted accuracies.
void write_metrics_csv(std::ostream& out, const ValidationReport& report);

}  // namespace mactrace
