#include "mactrace/validation/validation.hpp"

#include <algorithm>
#include <numeric>

#include "mactrace/core/random.hpp"

namespace mactrace {

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string metric_cell(const std::optional<Ratio>& r) {
  return r ? Json(r->value()).dump() : std::string{};
}

std::string metric_cell(const std::optional<double>& v) { return v ? Json(*v).dump() : std::string{}; }

}  // namespace

std::string_view to_string(Partition partition) {
  switch (partition) {
    case Partition::p1: return "P1";
    case Partition::p2: return "P2";
    case Partition::p3: return "P3";
  }
  return "P3";
}

Partition partition_of(std::size_t candidate_count, std::size_t ocr_words) {
  if (candidate_count > 0) return Partition::p1;
  return ocr_words <= kSparseTextWords ? Partition::p2 : Partition::p3;
}

Partition partition_of(const ImageResult& image) { return partition_of(image.candidate_count, image.ocr_words); }

PartitionedImages partition_images(std::span<const ImageResult> images) {
  PartitionedImages out;
  for (const auto& image : images) out[static_cast<std::size_t>(partition_of(image))].push_back(image.image_id);
  for (auto& ids : out) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return out;
}

std::vector<WorkItem> sample_for_annotation(const PartitionedImages& partitions, std::size_t n_per_partition,
                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WorkItem> worklist;
  for (std::size_t p = 0; p < kPartitionCount; ++p) {
    auto ids = partitions[p];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < n_per_partition) {
      throw InsufficientImages(std::string(to_string(static_cast<Partition>(p))) + " has " +
                               std::to_string(ids.size()) + " images, " + std::to_string(n_per_partition) +
                               " requested");
    }
    rng.shuffle(ids);
    for (std::size_t i = 0; i < n_per_partition; ++i) worklist.push_back({ids[i], static_cast<Partition>(p)});
  }
  rng.shuffle(worklist);
  return worklist;
}

std::string_view to_string(AnnotationFlag flag) {
  switch (flag) {
    case AnnotationFlag::redacted: return "redacted";
    case AnnotationFlag::placeholder: return "placeholder";
    case AnnotationFlag::uncertain: return "uncertain";
  }
  return "uncertain";
}

AnnotationFlag parse_annotation_flag(std::string_view text) {
  if (text == "redacted") return AnnotationFlag::redacted;
  if (text == "placeholder") return AnnotationFlag::placeholder;
  if (text == "uncertain") return AnnotationFlag::uncertain;
  throw InvalidRecord("unknown annotation flag: " + std::string(text));
}

AnnotationRecord annotation_from_json(const Json& j) {
  AnnotationRecord record;
  record.image_id = j.at("image_id").get<std::string>();
  record.reviewer_id = j.at("reviewer_id").is_number() ? j.at("reviewer_id").dump()
                                                        : j.at("reviewer_id").get<std::string>();
  if (record.image_id.empty() || record.reviewer_id.empty()) throw InvalidRecord("annotation without ids");
  for (const auto& m : j.value("macs", Json::array())) {
    if (auto mac = try_parse_mac(m.get<std::string>())) {
      record.macs.insert(*mac);
    } else {
      record.flags.insert(AnnotationFlag::placeholder);
    }
  }
  for (const auto& f : j.value("flags", Json::array())) record.flags.insert(parse_annotation_flag(f.get<std::string>()));
  return record;
}

Json annotation_to_json(const AnnotationRecord& record) {
  Json macs = Json::array();
  for (const auto& m : record.macs) macs.push_back(m.canonical());
  Json flags = Json::array();
  for (const auto f : record.flags) flags.push_back(to_string(f));
  return {{"image_id", record.image_id}, {"reviewer_id", record.reviewer_id}, {"macs", macs}, {"flags", flags}};
}

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  std::vector<AnnotationRecord> out;
  read_jsonl(path, [&](const Json& j) { out.push_back(annotation_from_json(j)); });
  return out;
}

void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records) {
  for (const auto& r : records) write_jsonl_line(out, annotation_to_json(r));
}

bool reviewer_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b)) {
    const auto strip = [](const std::string& s) {
      const auto nz = s.find_first_not_of('0');
      return nz == std::string::npos ? std::string{} : s.substr(nz);
    };
    const auto sa = strip(a);
    const auto sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

GroundTruth resolve_ground_truth(std::span<const AnnotationRecord> annotations, bool pipeline_had_candidates) {
  GroundTruth truth;
  if (!annotations.empty()) truth.image_id = annotations.front().image_id;

  std::vector<const AnnotationRecord*> by_reviewer;
  for (const auto& a : annotations) {
    const bool seen = std::any_of(by_reviewer.begin(), by_reviewer.end(),
                                  [&](const AnnotationRecord* r) { return r->reviewer_id == a.reviewer_id; });
    if (!seen) by_reviewer.push_back(&a);
  }
  if (by_reviewer.size() < 2) {
    throw TooFewReviewers("image " + truth.image_id + " has " + std::to_string(by_reviewer.size()) +
                          " reviewer(s)");
  }
  std::stable_sort(by_reviewer.begin(), by_reviewer.end(), [](const AnnotationRecord* x, const AnnotationRecord* y) {
    return reviewer_less(x->reviewer_id, y->reviewer_id);
  });

  const auto& a = *by_reviewer[0];
  const auto& b = *by_reviewer[1];
  truth.reviewers = {a.reviewer_id, b.reviewer_id};
  std::set_intersection(a.macs.begin(), a.macs.end(), b.macs.begin(), b.macs.end(),
                        std::inserter(truth.accepted, truth.accepted.end()));
  const auto recorded = [](const AnnotationRecord& r) {
    return !r.macs.empty() || r.flags.contains(AnnotationFlag::placeholder);
  };
  truth.inconclusive = pipeline_had_candidates && truth.accepted.empty() && (recorded(a) || recorded(b));
  return truth;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionCounts classify(const std::set<MacAddress>& pipeline_valid, const std::set<MacAddress>& accepted) {
  ConfusionCounts c;
  for (const auto& m : accepted) ++(pipeline_valid.contains(m) ? c.tp : c.fn);
  for (const auto& m : pipeline_valid) {
    if (!accepted.contains(m)) ++c.fp;
  }
  if (pipeline_valid.empty() && accepted.empty()) c.tn = 1;
  return c;
}

Ratio make_ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw DegenerateDenominator("zero denominator");
  const auto g = std::gcd(num, den);
  return {num / g, den / g};
}

Metrics metrics(const ConfusionCounts& c) {
  const auto defined = [](std::uint64_t num, std::uint64_t den) -> std::optional<Ratio> {
    try {
      return make_ratio(num, den);
    } catch (const DegenerateDenominator&) {
      return std::nullopt;
    }
  };
  return {defined(c.tp + c.tn, c.total()), defined(c.tp, c.tp + c.fp), defined(c.fp, c.fp + c.tn)};
}

PartitionWeights partition_weights(std::span<const ImageResult> images) {
  PartitionWeights w{};
  if (images.empty()) return w;
  for (const auto& image : images) w[static_cast<std::size_t>(partition_of(image))] += 1.0;
  for (auto& x : w) x /= static_cast<double>(images.size());
  return w;
}

WeightedAccuracy weighted_accuracy(const std::array<ConfusionCounts, kPartitionCount>& per_partition,
                                   const PartitionWeights& weights) {
  WeightedAccuracy out;
  double by_accuracy = 0;
  bool all_defined = true;
  double num = 0;
  double den = 0;
  for (std::size_t p = 0; p < kPartitionCount; ++p) {
    const auto& c = per_partition[p];
    const auto w = weights[p];
    if (w == 0) continue;
    const auto acc = metrics(c).accuracy;
    if (acc) {
      by_accuracy += w * acc->value();
    } else {
      all_defined = false;
    }
    num += w * static_cast<double>(c.tp + c.tn);
    den += w * static_cast<double>(c.total());
  }
  if (all_defined) out.by_accuracy = by_accuracy;
  if (den > 0) out.by_counts = num / den;
  return out;
}

ConfusionCounts ValidationReport::total() const {
  ConfusionCounts t;
  for (const auto& c : counts) t += c;
  return t;
}

WeightedAccuracy ValidationReport::weighted() const { return weighted_accuracy(counts, weights); }

ValidationReport evaluate(std::span<const WorkItem> worklist, std::span<const ImageResult> results,
                          std::span<const AnnotationRecord> annotations, const PartitionWeights& weights) {
  ValidationReport report;
  report.weights = weights;

  std::map<std::string, const ImageResult*> result_by_id;
  for (const auto& r : results) result_by_id.emplace(r.image_id, &r);
  std::map<std::string, std::vector<AnnotationRecord>> by_image;
  for (const auto& a : annotations) by_image[a.image_id].push_back(a);

  const ImageResult empty;
  for (const auto& item : worklist) {
    const auto p = static_cast<std::size_t>(item.partition);
    const auto it = by_image.find(item.image_id);
    if (it == by_image.end()) {
      ++report.missing_annotations;
      continue;
    }
    const auto rit = result_by_id.find(item.image_id);
    const ImageResult& result = rit == result_by_id.end() ? empty : *rit->second;
    GroundTruth truth;
    try {
      truth = resolve_ground_truth(it->second, result.candidate_count > 0);
    } catch (const TooFewReviewers&) {
      ++report.missing_annotations;
      continue;
    }
    ++report.annotated[p];
    if (truth.inconclusive) {
      ++report.inconclusive[p];
      continue;
    }
    report.counts[p] += classify(result.valid_macs, truth.accepted);
  }
  return report;
}

void write_metrics_csv(std::ostream& out, const ValidationReport& report) {
  out << "partition,tp,fp,fn,tn,inconclusive,accuracy,precision,fpr\n";
  const auto row = [&](std::string_view name, const ConfusionCounts& c, std::size_t inconclusive) {
    const auto m = metrics(c);
    out << name << ',' << c.tp << ',' << c.fp << ',' << c.fn << ',' << c.tn << ',' << inconclusive << ','
        << metric_cell(m.accuracy) << ',' << metric_cell(m.precision) << ',' << metric_cell(m.false_positive_rate)
        << '\n';
  };
  std::size_t inconclusive = 0;
  for (std::size_t p = 0; p < kPartitionCount; ++p) {
    row(to_string(static_cast<Partition>(p)), report.counts[p], report.inconclusive[p]);
    inconclusive += report.inconclusive[p];
  }
  row("Total", report.total(), inconclusive);
  const auto w = report.weighted();
  out << "weighted_by_accuracy,,,,,," << metric_cell(w.by_accuracy) << ",,\n";
  out << "weighted_by_counts,,,,,," << metric_cell(w.by_counts) << ",,\n";
}

}  // namespace mactrace
