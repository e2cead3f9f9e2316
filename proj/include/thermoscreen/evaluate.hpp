// Copyright (c) 2026 thermoscreen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thermoscreen/types.hpp"

namespace thermoscreen {

struct Annotation {
  std::string image_name;
  BoundingBox bbox;
  bool mask = false;
  std::optional<double> lux;
  std::optional<std::int64_t> timestamp_ms;
};

/// Illumination buckets, left-closed: [0,25), [25,75), [75,150), [150,inf).
enum class LuxBucket { kB0_25, kB25_75, kB75_150, kB150Plus };

inline const char* lux_bucket_name(LuxBucket b) {
  switch (b) {
    case LuxBucket::kB0_25: return "0-25";
    case LuxBucket::kB25_75: return "25-75";
    case LuxBucket::kB75_150: return "75-150";
    case LuxBucket::kB150Plus: return ">150";
  }
  return "?";
}

inline LuxBucket lux_bucket(double lux) {
  require(lux >= 0, "lux must be non-negative");
  if (lux < 25) return LuxBucket::kB0_25;
  if (lux < 75) return LuxBucket::kB25_75;
  if (lux < 150) return LuxBucket::kB75_150;
  return LuxBucket::kB150Plus;
}

constexpr LuxBucket kAllLuxBuckets[] = {LuxBucket::kB0_25, LuxBucket::kB25_75,
                                        LuxBucket::kB75_150, LuxBucket::kB150Plus};

struct EvalReport {
  double mean_iou = 0;
  double map = 0;
  double precision = 0;
  double recall = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  bool precision_defined = true;  // false when TP+FP == 0 (reported as 0)
  bool recall_defined = true;     // false when TP+FN == 0
  std::map<LuxBucket, EvalReport> by_lux;
};

double iou(const BoundingBox& a, const BoundingBox& b);

struct Match {
  std::size_t detection_index;
  std::size_t ground_truth_index;
  double iou;
};

struct MatchResult {
  std::vector<Match> matches;
  std::vector<std::size_t> unmatched_detections;     // false positives
  std::vector<std::size_t> unmatched_ground_truths;  // false negatives
};

/// Greedy matching over one image: detections in descending confidence, each
/// taking the unmatched ground truth of highest IOU >= threshold. Ties break
/// toward the lower ground-truth index.
MatchResult match_detections(const std::vector<Detection>& detections,
                             const std::vector<BoundingBox>& ground_truths,
                             double iou_threshold = 0.5);

enum class ApInterpolation { kAllPoints, kElevenPoint };

/// Single-class average precision: area under the confidence-swept
/// precision-recall curve. All-points (exact) by default.
double average_precision(const std::vector<Detection>& detections,
                         const std::vector<BoundingBox>& ground_truths,
                         double iou_threshold = 0.5,
                         ApInterpolation interp = ApInterpolation::kAllPoints);

double mean_iou(const std::vector<Match>& matches);

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
  bool precision_defined = true;
  bool recall_defined = true;
};

PrecisionRecall precision_recall(std::int64_t tp, std::int64_t fp, std::int64_t fn);

/// Partitions items by their lux reading; items with no reading land in the
/// `unbucketed` remainder.
template <typename Item, typename LuxOf>
struct LuxBuckets {
  std::map<LuxBucket, std::vector<Item>> buckets;
  std::vector<Item> unbucketed;
};

template <typename Item, typename LuxOf>
LuxBuckets<Item, LuxOf> bucket_by_lux(const std::vector<Item>& items, LuxOf lux_of) {
  LuxBuckets<Item, LuxOf> out;
  for (const Item& item : items) {
    const std::optional<double> lux = lux_of(item);
    if (!lux) {
      out.unbucketed.push_back(item);
    } else {
      out.buckets[lux_bucket(*lux)].push_back(item);
    }
  }
  return out;
}

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

struct TimestampedItem {
  std::string image_name;
  std::int64_t timestamp_ms = 0;
};

/// Chronological 70:20:10 split: sort ascending by timestamp, first
/// floor(0.7 n) train, next floor(0.2 n) val, remainder test.
DatasetSplit split_by_timestamp(std::vector<TimestampedItem> items);

/// Per-image detection/ground-truth grouping used by evaluate_detections.
struct ImageEvalInput {
  std::string image_name;
  std::vector<Detection> detections;
  std::vector<BoundingBox> ground_truths;
  std::optional<double> lux;
};

/// Full report over a set of images: meanIOU over matched pairs, MAP over
/// the pooled detections, precision/recall from pooled counts, optional
/// per-lux-bucket sub-reports. Reduction order is fixed (sorted by image
/// name) so parallel metric computation stays deterministic.
EvalReport evaluate_detections(std::vector<ImageEvalInput> inputs,
                               double iou_threshold = 0.5, bool by_lux = false);

std::string format_report_text(const EvalReport& report);
std::string format_report_json(const EvalReport& report);

}  // namespace thermoscreen
