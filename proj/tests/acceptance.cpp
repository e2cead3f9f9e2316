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

// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Tolerances and thresholds are pinned in code.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "ap_oracle.hpp"
#include "thermoscreen/augment.hpp"
#include "thermoscreen/cli.hpp"
#include "thermoscreen/data.hpp"
#include "thermoscreen/detect.hpp"
#include "thermoscreen/evaluate.hpp"
#include "thermoscreen/pipeline.hpp"
#include "thermoscreen/radiometric.hpp"
#include "thermoscreen/rng.hpp"
#include "thermoscreen/screen.hpp"

using namespace thermoscreen;
namespace fs = std::filesystem;

namespace {

int failures = 0;
std::ostringstream detail;

void report(int number, const char* name, bool pass) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", number, name);
  if (!pass) {
    ++failures;
    if (!detail.str().empty()) std::printf("       %s\n", detail.str().c_str());
  }
  detail.str("");
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("thermoscreen_accept_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criterion 1: normalization range, monotonicity, degenerate band -------

bool criterion_normalization() {
  Rng rng(1001);
  long long pairs_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    ThermalFrame frame;
    frame.temps.resize(16, 20);
    for (Eigen::Index i = 0; i < frame.temps.size(); ++i)
      frame.temps.data()[i] = rng.uniform(-10.0, 120.0);
    for (const NormalizationMode mode :
         {NormalizationMode::kBandClamp, NormalizationMode::kLiteral}) {
      NormalizationConfig cfg;
      cfg.mode = mode;
      const NormalizedImage img = normalize_frame(frame, cfg);
      if (img.pixels.minCoeff() < 0.0 || img.pixels.maxCoeff() > 1.0) {
        detail << "pixel out of [0,1] in trial " << trial;
        return false;
      }
    }
    const NormalizedImage img = normalize_frame(frame);
    for (int p = 0; p < 10 && pairs_checked < 10000; ++p, ++pairs_checked) {
      const auto a = static_cast<Eigen::Index>(rng.uniform_int(0, frame.temps.size() - 1));
      const auto b = static_cast<Eigen::Index>(rng.uniform_int(0, frame.temps.size() - 1));
      if (frame.temps.data()[a] <= frame.temps.data()[b] &&
          img.pixels.data()[a] > img.pixels.data()[b]) {
        detail << "monotonicity violated in trial " << trial;
        return false;
      }
    }
  }
  ThermalFrame uniform;
  uniform.temps = MatrixX<double>::Constant(8, 8, 31.0);
  const NormalizedImage img = normalize_frame(uniform);
  if (!(img.pixels.array() == 0.5).all()) {
    detail << "uniform frame did not map to 0.5";
    return false;
  }
  return true;
}

// --- criterion 2: grayscale / gamma fidelity --------------------------------

bool criterion_augment_fidelity() {
  Rng rng(1002);
  for (int trial = 0; trial < 100; ++trial) {
    GrayImage img;
    img.pixels.resize(8, 8);
    for (Eigen::Index i = 0; i < img.pixels.size(); ++i)
      img.pixels.data()[i] = rng.next_double();
    const GrayImage out = gamma_correct(img, 1.0);
    for (Eigen::Index i = 0; i < img.pixels.size(); ++i)
      if (out.pixels.data()[i] != img.pixels.data()[i]) {
        detail << "gamma(.,1) not an exact identity";
        return false;
      }
  }

  RgbImage red;
  red.r = MatrixX<double>::Constant(1, 1, 1.0);
  red.g = MatrixX<double>::Constant(1, 1, 0.0);
  red.b = MatrixX<double>::Constant(1, 1, 0.0);
  if (std::abs(rgb_to_gray(red).pixels(0, 0) - 0.229) > 1e-12) {
    detail << "(1,0,0) did not map to 0.229";
    return false;
  }
  GrayImage quarter;
  quarter.pixels = MatrixX<double>::Constant(1, 1, 0.25);
  if (std::abs(gamma_correct(quarter, 0.5).pixels(0, 0) - 0.0625) > 1e-12) {
    detail << "0.25^(1/0.5) != 0.0625";
    return false;
  }

  Rng gamma_rng(1003);
  AugmentConfig cfg;
  for (int i = 0; i < 10000; ++i) {
    const double g = gamma_rng.uniform(cfg.gamma_min, cfg.gamma_max);
    if (g < 0.3 || g > 0.9) {
      detail << "sampled gamma " << g << " outside [0.3, 0.9]";
      return false;
    }
  }
  return true;
}

// --- criterion 3: AP oracle equivalence -------------------------------------

BoundingBox grid_box(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1) {
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1),
          static_cast<double>(y1)};
}

std::vector<BoundingBox> all_grid_boxes(std::int64_t grid) {
  std::vector<BoundingBox> boxes;
  for (std::int64_t x0 = 0; x0 < grid; ++x0)
    for (std::int64_t x1 = x0 + 1; x1 <= grid; ++x1)
      for (std::int64_t y0 = 0; y0 < grid; ++y0)
        for (std::int64_t y1 = y0 + 1; y1 <= grid; ++y1)
          boxes.push_back(grid_box(x0, y0, x1, y1));
  return boxes;
}

bool ap_agrees(const std::vector<Detection>& dets, const std::vector<BoundingBox>& gts,
               double threshold) {
  const double got = average_precision(dets, gts, threshold);
  const double want = testing::brute_force_ap(dets, gts, threshold);
  if (std::abs(got - want) > 1e-9) {
    detail << "AP mismatch: got " << got << " want " << want;
    return false;
  }
  return true;
}

bool criterion_ap_oracle() {
  const std::vector<BoundingBox> boxes = all_grid_boxes(4);  // 36 boxes

  // Exhaustive: every 1-detection/1-ground-truth configuration.
  for (const BoundingBox& det_box : boxes)
    for (const BoundingBox& gt_box : boxes)
      if (!ap_agrees({{0, det_box, 0.8}}, {gt_box}, 0.5)) return false;

  // Exhaustive 2x2 over a subpool, both confidence orders.
  const std::vector<BoundingBox> pool{grid_box(0, 0, 2, 2), grid_box(1, 0, 3, 2),
                                      grid_box(0, 1, 2, 4), grid_box(2, 2, 4, 4),
                                      grid_box(1, 1, 3, 3), grid_box(0, 0, 4, 4)};
  for (std::size_t a = 0; a < pool.size(); ++a)
    for (std::size_t b = 0; b < pool.size(); ++b)
      for (std::size_t c = 0; c < pool.size(); ++c)
        for (std::size_t d = 0; d < pool.size(); ++d)
          for (const double first_conf : {0.9, 0.4}) {
            const std::vector<Detection> dets{{0, pool[a], first_conf},
                                              {0, pool[b], 0.6}};
            if (!ap_agrees(dets, {pool[c], pool[d]}, 0.5)) return false;
          }

  // 1000 random cases, up to 5 per side.
  Rng rng(1004);
  auto random_box = [&rng]() {
    const std::int64_t x0 = rng.uniform_int(0, 3);
    const std::int64_t y0 = rng.uniform_int(0, 3);
    return grid_box(x0, y0, rng.uniform_int(x0 + 1, 4), rng.uniform_int(y0 + 1, 4));
  };
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Detection> dets;
    std::vector<BoundingBox> gts;
    const std::int64_t n_det = rng.uniform_int(0, 5);
    const std::int64_t n_gt = rng.uniform_int(0, 5);
    for (std::int64_t i = 0; i < n_det; ++i) dets.push_back({0, random_box(), rng.next_double()});
    for (std::int64_t i = 0; i < n_gt; ++i) gts.push_back(random_box());
    if (!ap_agrees(dets, gts, 0.5)) return false;
  }

  // Worked example: 2 ground truths, sweep TP, FP, TP -> 5/6.
  const std::vector<BoundingBox> gts{grid_box(0, 0, 2, 2), grid_box(2, 2, 4, 4)};
  const std::vector<Detection> dets{{0, grid_box(0, 0, 2, 2), 0.9},
                                    {0, grid_box(0, 2, 2, 4), 0.8},
                                    {0, grid_box(2, 2, 4, 4), 0.7}};
  const double ap = average_precision(dets, gts, 0.5);
  if (std::abs(ap - 5.0 / 6.0) > 1e-12) {
    detail << "worked example AP " << ap << " != 5/6";
    return false;
  }
  return true;
}

// --- criterion 4: screening oracle on the n=200 seed-42 dataset -------------

bool criterion_screening_oracle() {
  const fs::path dir = temp_dir("screening");
  DatasetGenConfig gen;
  gen.n = 200;
  gen.seed = 42;
  gen.noise_sigma = 0.1;
  gen.out_dir = dir;
  generate_synthetic_dataset(gen);

  const std::vector<ThermalFrame> frames = load_dataset_frames(dir);
  const std::vector<ManifestEntry> manifest = parse_manifest(dir / "manifest.txt");
  std::map<std::string, const ThermalFrame*> frame_by_name;
  for (std::size_t i = 0; i < manifest.size(); ++i)
    frame_by_name[manifest[i].image_name] = &frames[i];

  const std::vector<SyntheticFaceTruth> truths = parse_face_truths(dir / "faces.txt");
  const ScreeningConfig screening;
  std::int64_t fever_tp = 0, fever_fp = 0, fever_fn = 0;
  std::int64_t mask_correct = 0;
  for (const SyntheticFaceTruth& truth : truths) {
    const ThermalFrame& frame = *frame_by_name.at(truth.image_name);
    const bool fever_pred =
        classify_fever(max_face_temperature(frame, truth.bbox), screening);
    const bool fever_true = truth.peak_temp > screening.fever_threshold;
    if (fever_pred && fever_true) ++fever_tp;
    if (fever_pred && !fever_true) ++fever_fp;
    if (!fever_pred && fever_true) ++fever_fn;
    if (classify_mask_heuristic(frame, truth.bbox, screening).mask == truth.masked)
      ++mask_correct;
  }
  const double mask_accuracy =
      static_cast<double>(mask_correct) / static_cast<double>(truths.size());
  if (fever_fp != 0 || fever_fn != 0) {
    detail << "fever tp " << fever_tp << " fp " << fever_fp << " fn " << fever_fn;
    return false;
  }
  if (mask_accuracy < 0.95) {
    detail << "mask accuracy " << mask_accuracy;
    return false;
  }

  // Baseline detector per-face recall at IOU 0.5.
  const std::vector<GroundTruthRecord> gt_records =
      parse_ground_truth(find_ground_truth_file(dir));
  std::map<std::string, std::vector<BoundingBox>> gt_by_name;
  for (const GroundTruthRecord& rec : gt_records)
    gt_by_name[rec.image_name].push_back(rec.bbox());
  std::int64_t matched = 0, total = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& gts = gt_by_name[manifest[i].image_name];
    const auto dets = detect_faces_baseline(frames[i]);
    const MatchResult mr = match_detections(dets, gts, 0.5);
    matched += static_cast<std::int64_t>(mr.matches.size());
    total += static_cast<std::int64_t>(gts.size());
  }
  const double recall = static_cast<double>(matched) / static_cast<double>(total);
  fs::remove_all(dir);
  if (recall < 0.90) {
    detail << "detector recall " << recall << " (" << matched << "/" << total << ")";
    return false;
  }
  return true;
}

// --- criterion 5: fever threshold fidelity ----------------------------------

bool criterion_fever_threshold() {
  return !classify_fever(37.5) && classify_fever(37.5 + 1e-6);
}

// --- criterion 6: lux-bucket protocol ---------------------------------------

bool criterion_lux_buckets() {
  const std::vector<std::pair<double, LuxBucket>> cases{
      {10, LuxBucket::kB0_25},    {25, LuxBucket::kB25_75},
      {74, LuxBucket::kB25_75},   {75, LuxBucket::kB75_150},
      {150, LuxBucket::kB150Plus}, {151, LuxBucket::kB150Plus}};
  for (const auto& [lux, bucket] : cases)
    if (lux_bucket(lux) != bucket) {
      detail << "lux " << lux << " landed in the wrong bucket";
      return false;
    }

  // Report shape: four bucket rows regardless of occupancy.
  ImageEvalInput input;
  input.image_name = "a";
  input.lux = 10;
  input.ground_truths = {{0, 0, 10, 10}};
  input.detections = {{0, {0, 0, 10, 10}, 0.9}};
  const EvalReport report = evaluate_detections({input}, 0.5, true);
  if (report.by_lux.size() != 4) {
    detail << "expected a four-row bucket table, got " << report.by_lux.size();
    return false;
  }
  return true;
}

// --- criterion 7: split fidelity ---------------------------------------------

bool criterion_split() {
  std::vector<TimestampedItem> items;
  for (int i = 1; i <= 10; ++i) items.push_back({"img" + std::to_string(i), i * 100});
  const DatasetSplit split = split_by_timestamp(items);
  if (split.train.size() != 7 || split.val.size() != 2 || split.test.size() != 1) {
    detail << "split sizes " << split.train.size() << "/" << split.val.size() << "/"
           << split.test.size();
    return false;
  }
  return split.train.front() == "img1" && split.test.front() == "img10";
}

// --- criterion 8: round trips -------------------------------------------------

bool criterion_round_trips() {
  Rng rng(1008);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<GroundTruthRecord> records;
    const std::int64_t n = rng.uniform_int(0, 6);
    for (std::int64_t i = 0; i < n; ++i) {
      GroundTruthRecord rec;
      rec.image_name = "f" + std::to_string(rng.uniform_int(0, 9)) + ".pgm";
      rec.x_min = rng.uniform_int(0, 300);
      rec.x_max = rec.x_min + rng.uniform_int(1, 40);
      rec.y_min = rng.uniform_int(0, 220);
      rec.y_max = rec.y_min + rng.uniform_int(1, 40);
      rec.mask = rng.next_double() < 0.5;
      records.push_back(rec);
    }
    std::ostringstream out;
    write_ground_truth(records, out);
    std::istringstream in(out.str());
    const auto parsed = parse_ground_truth(in);
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
      return std::tie(a.image_name, a.y_min, a.x_min) <
             std::tie(b.image_name, b.y_min, b.x_min);
    });
    if (parsed != records) {
      detail << "ground-truth round trip diverged in trial " << trial;
      return false;
    }
  }

  ScreeningEvent event;
  event.frame_id = 7;
  event.timestamp_ms = 1234567;
  event.alert = true;
  PersonScreeningResult person;
  person.frame_id = 7;
  person.bbox = {12, 34, 56, 78};
  person.max_temp = 38.125;
  person.fever = true;
  person.mask = true;
  person.mask_score = 5.5;
  event.persons.push_back(person);
  const ScreeningEvent parsed = parse_event(format_event(event));
  if (parsed.frame_id != event.frame_id || parsed.alert != event.alert ||
      parsed.persons.size() != 1 || parsed.persons[0].bbox != person.bbox ||
      parsed.persons[0].max_temp != person.max_temp) {
    detail << "event line did not re-parse losslessly";
    return false;
  }
  return true;
}

// --- criterion 9: throughput ---------------------------------------------------

bool criterion_throughput() {
  std::vector<ThermalFrame> frames;
  frames.reserve(1000);
  for (std::int64_t i = 0; i < 1000; ++i) {
    SyntheticSceneConfig cfg;
    cfg.seed = 9000 + static_cast<std::uint64_t>(i);
    cfg.faces.push_back(SyntheticFace{80, 80, 10, 12, 38.2, false});
    cfg.faces.push_back(SyntheticFace{240, 160, 9, 11, 36.6, true});
    ThermalFrame frame = generate_synthetic_frame(cfg).frame;
    frame.frame_id = i;
    frames.push_back(std::move(frame));
  }
  std::ostringstream log;
  const StreamSummary summary = run_stream(frames, {}, log);
  detail << "achieved " << summary.fps << " fps";
  std::printf("       stream throughput: %.1f fps over %lld frames (target 9)\n",
              summary.fps, static_cast<long long>(summary.frames));
  if (summary.frames != 1000 || summary.fps < 9.0) return false;
  detail.str("");
  return true;
}

// --- criterion 10: determinism --------------------------------------------------

bool criterion_determinism() {
  const fs::path dir_a = temp_dir("det_a");
  const fs::path dir_b = temp_dir("det_b");
  DatasetGenConfig gen;
  gen.n = 40;
  gen.seed = 42;
  gen.out_dir = dir_a;
  generate_synthetic_dataset(gen);
  gen.out_dir = dir_b;
  generate_synthetic_dataset(gen);
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const fs::path other = dir_b / entry.path().filename();
    if (!fs::exists(other) || file_bytes(entry.path()) != file_bytes(other)) {
      detail << "dataset file " << entry.path().filename() << " differs between runs";
      return false;
    }
  }

  const std::vector<ThermalFrame> frames = load_dataset_frames(dir_a);
  std::ostringstream log_a, log_b;
  run_stream(frames, {}, log_a);
  run_stream(frames, {}, log_b);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  if (log_a.str() != log_b.str()) {
    detail << "event logs differ between runs";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  report(1, "normalization range, monotonicity, degenerate band", criterion_normalization());
  report(2, "grayscale/gamma fidelity and gamma sampling range", criterion_augment_fidelity());
  report(3, "average precision matches the brute-force oracle", criterion_ap_oracle());
  report(4, "screening oracle: fever exact, mask >= 95%, detector recall >= 90%",
         criterion_screening_oracle());
  report(5, "fever threshold strict at 37.5 degC", criterion_fever_threshold());
  report(6, "lux-bucket protocol and four-row report shape", criterion_lux_buckets());
  report(7, "chronological 70:20:10 split", criterion_split());
  report(8, "ground-truth and event-log round trips", criterion_round_trips());
  report(9, "stream throughput >= 9 fps over 1000 frames", criterion_throughput());
  report(10, "seeded generation and streaming are byte-identical", criterion_determinism());

  if (failures > 0) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
