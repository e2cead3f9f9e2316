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

#include "thermoscreen/evaluate.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace thermoscreen {

double iou(const BoundingBox& a, const BoundingBox& b) {
  require(a.valid() && b.valid(), "iou requires valid boxes");
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  if (inter <= 0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

MatchResult match_detections(const std::vector<Detection>& detections,
                             const std::vector<BoundingBox>& ground_truths,
                             double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });

  MatchResult result;
  std::vector<bool> gt_taken(ground_truths.size(), false);
  for (const std::size_t di : order) {
    double best_iou = 0;
    std::size_t best_gt = ground_truths.size();
    for (std::size_t gi = 0; gi < ground_truths.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double overlap = iou(detections[di].bbox, ground_truths[gi]);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best_iou = overlap;
        best_gt = gi;  // ties keep the lower ground-truth index
      }
    }
    if (best_gt < ground_truths.size()) {
      gt_taken[best_gt] = true;
      result.matches.push_back(Match{di, best_gt, best_iou});
    } else {
      result.unmatched_detections.push_back(di);
    }
  }
  for (std::size_t gi = 0; gi < ground_truths.size(); ++gi)
    if (!gt_taken[gi]) result.unmatched_ground_truths.push_back(gi);
  return result;
}

namespace {

// Pooled confidence sweep over any number of images: returns the tp/fp flag
// sequence in descending-confidence order plus the total ground-truth count.
struct Sweep {
  std::vector<bool> is_tp;
  std::size_t n_gt = 0;
};

Sweep sweep_detections(const std::vector<ImageEvalInput>& inputs, double iou_threshold) {
  struct Ref {
    std::size_t image;
    std::size_t det;
    double confidence;
  };
  std::vector<Ref> refs;
  Sweep sweep;
  for (std::size_t ii = 0; ii < inputs.size(); ++ii) {
    sweep.n_gt += inputs[ii].ground_truths.size();
    for (std::size_t di = 0; di < inputs[ii].detections.size(); ++di)
      refs.push_back(Ref{ii, di, inputs[ii].detections[di].confidence});
  }
  std::stable_sort(refs.begin(), refs.end(),
                   [](const Ref& a, const Ref& b) { return a.confidence > b.confidence; });

  std::vector<std::vector<bool>> gt_taken(inputs.size());
  for (std::size_t ii = 0; ii < inputs.size(); ++ii)
    gt_taken[ii].assign(inputs[ii].ground_truths.size(), false);

  sweep.is_tp.reserve(refs.size());
  for (const Ref& ref : refs) {
    const auto& dets = inputs[ref.image].detections;
    const auto& gts = inputs[ref.image].ground_truths;
    double best_iou = 0;
    std::size_t best_gt = gts.size();
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[ref.image][gi]) continue;
      const double overlap = iou(dets[ref.det].bbox, gts[gi]);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best_iou = overlap;
        best_gt = gi;
      }
    }
    if (best_gt < gts.size()) {
      gt_taken[ref.image][best_gt] = true;
      sweep.is_tp.push_back(true);
    } else {
      sweep.is_tp.push_back(false);
    }
  }
  return sweep;
}

double ap_from_sweep(const Sweep& sweep, ApInterpolation interp) {
  if (sweep.n_gt == 0) return 0.0;
  std::vector<double> recalls, precisions;
  std::int64_t tp = 0, fp = 0;
  for (const bool hit : sweep.is_tp) {
    hit ? ++tp : ++fp;
    recalls.push_back(static_cast<double>(tp) / static_cast<double>(sweep.n_gt));
    precisions.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  // Precision envelope from the right.
  for (std::size_t i = precisions.size(); i-- > 1;)
    precisions[i - 1] = std::max(precisions[i - 1], precisions[i]);

  if (interp == ApInterpolation::kElevenPoint) {
    double sum = 0;
    for (int k = 0; k <= 10; ++k) {
      const double r = k / 10.0;
      double p = 0;
      for (std::size_t i = 0; i < recalls.size(); ++i)
        if (recalls[i] >= r) {
          p = precisions[i];
          break;
        }
      sum += p;
    }
    return sum / 11.0;
  }

  double ap = 0;
  double prev_recall = 0;
  for (std::size_t i = 0; i < recalls.size(); ++i) {
    ap += (recalls[i] - prev_recall) * precisions[i];
    prev_recall = recalls[i];
  }
  return ap;
}

}  // namespace

double average_precision(const std::vector<Detection>& detections,
                         const std::vector<BoundingBox>& ground_truths,
                         double iou_threshold, ApInterpolation interp) {
  ImageEvalInput single;
  single.detections = detections;
  single.ground_truths = ground_truths;
  return ap_from_sweep(sweep_detections({single}, iou_threshold), interp);
}

double mean_iou(const std::vector<Match>& matches) {
  if (matches.empty()) return 0.0;
  double sum = 0;
  for (const Match& m : matches) sum += m.iou;
  return sum / static_cast<double>(matches.size());
}

PrecisionRecall precision_recall(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  require(tp >= 0 && fp >= 0 && fn >= 0, "counts must be non-negative");
  PrecisionRecall pr;
  if (tp + fp == 0) {
    pr.precision = 0;
    pr.precision_defined = false;
  } else {
    pr.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    pr.recall = 0;
    pr.recall_defined = false;
  } else {
    pr.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  return pr;
}

DatasetSplit split_by_timestamp(std::vector<TimestampedItem> items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const TimestampedItem& a, const TimestampedItem& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  const std::size_t n = items.size();
  const auto n_train = static_cast<std::size_t>(0.7 * static_cast<double>(n));
  const auto n_val = static_cast<std::size_t>(0.2 * static_cast<double>(n));
  DatasetSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train)
      split.train.push_back(items[i].image_name);
    else if (i < n_train + n_val)
      split.val.push_back(items[i].image_name);
    else
      split.test.push_back(items[i].image_name);
  }
  return split;
}

namespace {

EvalReport evaluate_flat(const std::vector<ImageEvalInput>& inputs, double iou_threshold) {
  EvalReport report;
  std::vector<Match> all_matches;
  for (const ImageEvalInput& input : inputs) {
    MatchResult mr = match_detections(input.detections, input.ground_truths, iou_threshold);
    report.tp += static_cast<std::int64_t>(mr.matches.size());
    report.fp += static_cast<std::int64_t>(mr.unmatched_detections.size());
    report.fn += static_cast<std::int64_t>(mr.unmatched_ground_truths.size());
    all_matches.insert(all_matches.end(), mr.matches.begin(), mr.matches.end());
  }
  report.mean_iou = mean_iou(all_matches);
  report.map = ap_from_sweep(sweep_detections(inputs, iou_threshold),
                             ApInterpolation::kAllPoints);
  const PrecisionRecall pr = precision_recall(report.tp, report.fp, report.fn);
  report.precision = pr.precision;
  report.recall = pr.recall;
  report.precision_defined = pr.precision_defined;
  report.recall_defined = pr.recall_defined;
  return report;
}

}  // namespace

EvalReport evaluate_detections(std::vector<ImageEvalInput> inputs,
                               double iou_threshold, bool by_lux) {
  std::stable_sort(inputs.begin(), inputs.end(),
                   [](const ImageEvalInput& a, const ImageEvalInput& b) {
                     return a.image_name < b.image_name;
                   });
  EvalReport report = evaluate_flat(inputs, iou_threshold);
  if (by_lux) {
    auto grouped = bucket_by_lux(inputs, [](const ImageEvalInput& i) { return i.lux; });
    for (const LuxBucket bucket : kAllLuxBuckets) {
      auto it = grouped.buckets.find(bucket);
      report.by_lux[bucket] = (it == grouped.buckets.end())
                                  ? EvalReport{}
                                  : evaluate_flat(it->second, iou_threshold);
    }
  }
  return report;
}

namespace {

void append_report_row(std::ostringstream& out, const std::string& label,
                       const EvalReport& r) {
  out << std::left << std::setw(10) << label << std::right << std::fixed
      << std::setprecision(4) << std::setw(10) << r.mean_iou << std::setw(10) << r.map
      << std::setw(11) << r.precision << std::setw(9) << r.recall << std::setw(7)
      << r.tp << std::setw(7) << r.fp << std::setw(7) << r.fn << '\n';
}

}  // namespace

std::string format_report_text(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "bucket" << std::right << std::setw(10)
      << "meanIOU" << std::setw(10) << "MAP" << std::setw(11) << "precision"
      << std::setw(9) << "recall" << std::setw(7) << "TP" << std::setw(7) << "FP"
      << std::setw(7) << "FN" << '\n';
  append_report_row(out, "all", report);
  for (const auto& [bucket, sub] : report.by_lux)
    append_report_row(out, lux_bucket_name(bucket), sub);
  return out.str();
}

namespace {

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json obj;
  obj["mean_iou"] = r.mean_iou;
  obj["map"] = r.map;
  obj["precision"] = r.precision;
  obj["recall"] = r.recall;
  obj["precision_defined"] = r.precision_defined;
  obj["recall_defined"] = r.recall_defined;
  obj["tp"] = r.tp;
  obj["fp"] = r.fp;
  obj["fn"] = r.fn;
  if (!r.by_lux.empty()) {
    nlohmann::json buckets = nlohmann::json::object();
    for (const auto& [bucket, sub] : r.by_lux)
      buckets[lux_bucket_name(bucket)] = report_to_json(sub);
    obj["by_lux"] = buckets;
  }
  return obj;
}

}  // namespace

std::string format_report_json(const EvalReport& report) {
  return report_to_json(report).dump(2);
}

}  // namespace thermoscreen
