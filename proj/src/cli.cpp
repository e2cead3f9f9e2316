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

#include "thermoscreen/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermoscreen/augment.hpp"
#include "thermoscreen/data.hpp"
#include "thermoscreen/detect.hpp"
#include "thermoscreen/detect_io.hpp"
#include "thermoscreen/evaluate.hpp"
#include "thermoscreen/pipeline.hpp"
#include "thermoscreen/radiometric.hpp"
#include "thermoscreen/rng.hpp"
#include "thermoscreen/screen.hpp"

namespace thermoscreen {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flag > config file > default: CLI11 binds into these optionals, the
// config file fills the pipeline config first, then set optionals override.
struct PipelineFlags {
  std::optional<double> lower_clamp, upper_clamp;
  std::optional<std::string> norm_mode;
  std::optional<double> band_lo, band_hi, min_area, merge_gap;
  std::optional<double> fever_threshold, mask_delta;
  std::optional<std::string> external_cmd;
  std::optional<std::string> config_file;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "flat key=value config file");
    cmd->add_option("--lower-clamp", lower_clamp, "normalization lower clamp, degC");
    cmd->add_option("--upper-clamp", upper_clamp, "normalization upper clamp, degC");
    cmd->add_option("--mode", norm_mode, "normalization mode: band_clamp|literal");
    cmd->add_option("--body-band-lo", band_lo, "detector body band low, degC");
    cmd->add_option("--body-band-hi", band_hi, "detector body band high, degC");
    cmd->add_option("--min-area", min_area, "detector minimum region area, px^2");
    cmd->add_option("--merge-gap", merge_gap, "detector box merge gap, px");
    cmd->add_option("--fever-threshold", fever_threshold, "fever threshold, degC");
    cmd->add_option("--mask-delta", mask_delta, "mask score threshold, degC");
    cmd->add_option("--external-detector", external_cmd,
                    "external detector command (frame path appended)");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    std::optional<std::string> file = config_file;
    if (!file) {
      if (const char* env = std::getenv("THERMOSCREEN_CONFIG"); env && *env)
        file = std::string(env);
    }
    if (file) apply_config(parse_config_file(fs::path(*file)), cfg);
    if (lower_clamp) cfg.normalization.lower_clamp = *lower_clamp;
    if (upper_clamp) cfg.normalization.upper_clamp = *upper_clamp;
    if (norm_mode) {
      if (*norm_mode == "band_clamp")
        cfg.normalization.mode = NormalizationMode::kBandClamp;
      else if (*norm_mode == "literal")
        cfg.normalization.mode = NormalizationMode::kLiteral;
      else
        throw std::runtime_error("--mode must be band_clamp or literal");
    }
    if (band_lo) cfg.detector.body_band.lo = *band_lo;
    if (band_hi) cfg.detector.body_band.hi = *band_hi;
    if (min_area) cfg.detector.min_area = *min_area;
    if (merge_gap) cfg.detector.merge_gap = *merge_gap;
    if (fever_threshold) cfg.screening.fever_threshold = *fever_threshold;
    if (mask_delta) cfg.screening.mask_delta_threshold = *mask_delta;
    if (external_cmd) cfg.external_detector_cmd = *external_cmd;
    cfg.validate();
    return cfg;
  }
};

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  return file;
}

// -------------------------------------------------------------------------
// normalize
// -------------------------------------------------------------------------

struct NormalizeArgs {
  std::string input, out;
  bool stats = false;
  PipelineFlags flags;
};

int run_normalize(const NormalizeArgs& args) {
  const PipelineConfig cfg = args.flags.resolve();
  const ThermalFrame frame = load_thermal_frame(args.input);
  if (args.stats) {
    const FrameStats s = frame_stats(frame);
    std::cout << "min " << s.min << " max " << s.max << " mean " << s.mean << '\n';
  }
  const NormalizedImage img = normalize_frame(frame, cfg.normalization);
  write_pgm(to_byte_image(img), args.out);
  return 0;
}

// -------------------------------------------------------------------------
// augment
// -------------------------------------------------------------------------

struct AugmentArgs {
  std::string in_dir, out_dir, annotations;
  std::uint64_t seed = 0;
  double gamma_min = 0.3, gamma_max = 0.9;
  std::string coeffs = "default";
  bool negatives = false;
};

int run_augment(const AugmentArgs& args) {
  AugmentConfig cfg;
  cfg.seed = args.seed;
  cfg.gamma_min = args.gamma_min;
  cfg.gamma_max = args.gamma_max;
  if (args.coeffs == "bt601")
    cfg.gray_coefficients = kBt601GrayCoefficients;
  else if (args.coeffs != "default")
    throw std::runtime_error("--coeffs must be default or bt601");
  cfg.emit_negatives = args.negatives;
  cfg.validate();

  fs::create_directories(args.out_dir);
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(args.in_dir))
    if (entry.path().extension() == ".ppm") inputs.push_back(entry.path());
  std::sort(inputs.begin(), inputs.end());

  Rng rng(cfg.seed);
  for (const fs::path& path : inputs) {
    const RgbImage rgb = rgb_bytes_to_unit(read_ppm(path));
    const GrayImage gray = augment_image(rgb, cfg, rng);
    fs::path out = fs::path(args.out_dir) / path.filename();
    out.replace_extension(".pgm");
    write_pgm(to_byte_image(NormalizedImage{gray.pixels}), out);
    if (cfg.emit_negatives) {
      fs::path neg = out;
      neg.replace_filename(out.stem().string() + "_neg.pgm");
      write_pgm(to_byte_image(NormalizedImage{negate(gray).pixels}), neg);
    }
  }
  if (!args.annotations.empty()) {
    fs::copy_file(args.annotations,
                  fs::path(args.out_dir) / fs::path(args.annotations).filename(),
                  fs::copy_options::overwrite_existing);
  }
  std::cerr << "augmented " << inputs.size() << " images\n";
  return 0;
}

// -------------------------------------------------------------------------
// detect
// -------------------------------------------------------------------------

struct DetectArgs {
  std::string input, out;
  PipelineFlags flags;
};

std::vector<fs::path> dataset_images(const fs::path& input) {
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> images;
  if (fs::exists(input / "manifest.txt")) {
    for (const ManifestEntry& e : parse_manifest(input / "manifest.txt"))
      images.push_back(input / e.image_name);
  } else {
    for (const auto& entry : fs::directory_iterator(input))
      if (entry.path().extension() == ".pgm") images.push_back(entry.path());
    std::sort(images.begin(), images.end());
  }
  return images;
}

int run_detect(const DetectArgs& args) {
  const PipelineConfig cfg = args.flags.resolve();
  std::ofstream file;
  std::ostream& out = open_or_stdout(args.out, file);
  for (const fs::path& image : dataset_images(args.input)) {
    std::vector<Detection> dets;
    if (cfg.external_detector_cmd) {
      dets = run_external_detector(*cfg.external_detector_cmd, image);
    } else {
      const ThermalFrame frame = load_thermal_frame(image);
      dets = detect_faces_baseline(frame, cfg.detector);
    }
    write_detections(out, dets);
  }
  return 0;
}

// -------------------------------------------------------------------------
// screen
// -------------------------------------------------------------------------

struct ScreenArgs {
  std::string input, dets, masks, out;
  PipelineFlags flags;
};

json screening_to_json(const PersonScreeningResult& p) {
  json obj;
  obj["frame_id"] = p.frame_id;
  obj["bbox"] = {p.bbox.x_min, p.bbox.y_min, p.bbox.x_max, p.bbox.y_max};
  obj["max_temp"] = p.max_temp;
  obj["fever"] = p.fever;
  obj["mask"] = p.mask;
  obj["mask_score"] = p.mask_score;
  obj["ok"] = p.ok;
  if (!p.ok) obj["error"] = p.error;
  return obj;
}

int run_screen(const ScreenArgs& args) {
  const PipelineConfig cfg = args.flags.resolve();
  std::vector<ExternalMaskRecord> external_masks;
  if (!args.masks.empty()) {
    std::ifstream in(args.masks);
    if (!in) throw std::runtime_error("cannot open " + args.masks);
    external_masks = parse_external_masks(in);
  }
  std::ofstream file;
  std::ostream& out = open_or_stdout(args.out, file);

  for (const fs::path& image : dataset_images(args.input)) {
    const ThermalFrame frame = load_thermal_frame(image);
    std::vector<Detection> dets;
    if (!args.dets.empty()) {
      std::ifstream in(args.dets);
      if (!in) throw std::runtime_error("cannot open " + args.dets);
      for (const Detection& d : parse_external_detections(in))
        if (d.frame_id == frame.frame_id) dets.push_back(d);
    } else {
      dets = detect_faces_baseline(frame, cfg.detector);
    }
    std::vector<PersonScreeningResult> results = screen_frame(frame, dets, cfg.screening);
    // An external mask classifier replaces the heuristic verdict on the
    // best-overlapping record for this frame.
    for (PersonScreeningResult& res : results) {
      double best = 0;
      for (const ExternalMaskRecord& rec : external_masks) {
        if (rec.frame_id != res.frame_id) continue;
        const double overlap = iou(rec.bbox, res.bbox);
        if (overlap > best) {
          best = overlap;
          res.mask = rec.mask;
        }
      }
    }
    for (const PersonScreeningResult& res : results)
      out << screening_to_json(res).dump() << '\n';
  }
  return 0;
}

// -------------------------------------------------------------------------
// evaluate
// -------------------------------------------------------------------------

struct EvaluateArgs {
  std::string gt, dets, screening, manifest;
  bool by_lux = false;
  bool as_json = false;
  double iou_threshold = 0.5;
  std::string interp = "all-points";
};

int run_evaluate(const EvaluateArgs& args) {
  const std::vector<GroundTruthRecord> gt_records = parse_ground_truth(fs::path(args.gt));
  std::ifstream det_in(args.dets);
  if (!det_in) throw std::runtime_error("cannot open " + args.dets);
  const std::vector<Detection> detections = parse_external_detections(det_in);

  std::map<std::string, double> lux_by_name;
  if (!args.manifest.empty())
    for (const ManifestEntry& e : parse_manifest(fs::path(args.manifest)))
      lux_by_name[e.image_name] = e.lux;

  std::map<std::string, ImageEvalInput> by_name;
  std::map<std::int64_t, std::string> name_by_id;
  for (const GroundTruthRecord& rec : gt_records) {
    ImageEvalInput& input = by_name[rec.image_name];
    input.image_name = rec.image_name;
    input.ground_truths.push_back(rec.bbox());
    if (auto it = lux_by_name.find(rec.image_name); it != lux_by_name.end())
      input.lux = it->second;
    name_by_id[frame_id_from_name(rec.image_name)] = rec.image_name;
  }
  for (const Detection& det : detections) {
    const auto it = name_by_id.find(det.frame_id);
    const std::string key = it != name_by_id.end()
                                ? it->second
                                : "frame#" + std::to_string(det.frame_id);
    ImageEvalInput& input = by_name[key];
    input.image_name = key;
    input.detections.push_back(det);
    if (auto lx = lux_by_name.find(key); lx != lux_by_name.end()) input.lux = lx->second;
  }
  std::vector<ImageEvalInput> inputs;
  inputs.reserve(by_name.size());
  for (auto& [name, input] : by_name) inputs.push_back(std::move(input));

  const EvalReport report = evaluate_detections(std::move(inputs), args.iou_threshold,
                                                args.by_lux);
  if (args.as_json)
    std::cout << format_report_json(report) << '\n';
  else
    std::cout << format_report_text(report);

  if (!args.screening.empty()) {
    // Mask verdict comparison: each screened person matches the ground truth
    // of its image by IOU. Precision/recall and accuracy are all emitted so
    // either summary convention can be compared.
    std::ifstream in(args.screening);
    if (!in) throw std::runtime_error("cannot open " + args.screening);
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json obj = json::parse(line);
      const std::int64_t frame_id = obj.at("frame_id").get<std::int64_t>();
      const BoundingBox box{obj.at("bbox").at(0).get<double>(),
                            obj.at("bbox").at(1).get<double>(),
                            obj.at("bbox").at(2).get<double>(),
                            obj.at("bbox").at(3).get<double>()};
      const bool predicted = obj.at("mask").get<bool>();
      const auto name_it = name_by_id.find(frame_id);
      if (name_it == name_by_id.end()) continue;
      double best = 0;
      std::optional<bool> truth;
      for (const GroundTruthRecord& rec : gt_records) {
        if (rec.image_name != name_it->second) continue;
        const double overlap = iou(rec.bbox(), box);
        if (overlap >= args.iou_threshold && overlap > best) {
          best = overlap;
          truth = rec.mask;
        }
      }
      if (!truth) continue;
      if (predicted && *truth) ++tp;
      else if (predicted && !*truth) ++fp;
      else if (!predicted && *truth) ++fn;
      else ++tn;
    }
    const PrecisionRecall pr = precision_recall(tp, fp, fn);
    const std::int64_t total = tp + fp + fn + tn;
    const double accuracy =
        total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0;
    std::cout << "mask precision " << pr.precision << " recall " << pr.recall
              << " accuracy " << accuracy << " (tp " << tp << " fp " << fp << " fn "
              << fn << " tn " << tn << ")\n";
  }
  return 0;
}

// -------------------------------------------------------------------------
// synth / stream / split
// -------------------------------------------------------------------------

struct SynthArgs {
  std::int64_t n = 200;
  std::uint64_t seed = 42;
  std::string out;
  std::string scenario = "mixed";
  double noise_sigma = 0.1;
  std::int64_t width = 320, height = 240;
};

int run_synth(const SynthArgs& args) {
  DatasetGenConfig cfg;
  cfg.n = args.n;
  cfg.seed = args.seed;
  cfg.scenario = scenario_from_string(args.scenario);
  cfg.noise_sigma = args.noise_sigma;
  cfg.width = args.width;
  cfg.height = args.height;
  cfg.out_dir = args.out;
  const GeneratedDataset dataset = generate_synthetic_dataset(cfg);
  std::cerr << "wrote " << dataset.image_names.size() << " frames to " << args.out
            << '\n';
  return 0;
}

struct StreamArgs {
  std::string dataset, events, summary;
  PipelineFlags flags;
};

int run_stream_cmd(const StreamArgs& args) {
  const PipelineConfig cfg = args.flags.resolve();
  const std::vector<ThermalFrame> frames = load_dataset_frames(args.dataset);
  std::ofstream file;
  std::ostream& out = open_or_stdout(args.events, file);
  const StreamSummary summary = run_stream(frames, cfg, out);
  const std::string csv = format_summary_csv(summary);
  if (!args.summary.empty()) {
    std::ofstream summary_file(args.summary);
    if (!summary_file) throw std::runtime_error("cannot open " + args.summary);
    summary_file << csv;
  }
  std::cerr << csv;
  return 0;
}

struct SplitArgs {
  std::string manifest, out_dir;
};

int run_split(const SplitArgs& args) {
  std::vector<TimestampedItem> items;
  for (const ManifestEntry& e : parse_manifest(fs::path(args.manifest)))
    items.push_back(TimestampedItem{e.image_name, e.timestamp_ms});
  const DatasetSplit split = split_by_timestamp(std::move(items));
  auto write_list = [&](const char* name, const std::vector<std::string>& list) {
    if (args.out_dir.empty()) {
      for (const std::string& item : list) std::cout << name << ' ' << item << '\n';
      return;
    }
    std::ofstream out(fs::path(args.out_dir) / (std::string(name) + ".txt"));
    for (const std::string& item : list) out << item << '\n';
  };
  if (!args.out_dir.empty()) fs::create_directories(args.out_dir);
  write_list("train", split.train);
  write_list("val", split.val);
  write_list("test", split.test);
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"thermoscreen: illumination-invariant thermal fever/mask screening"};
  app.require_subcommand(1);

  NormalizeArgs normalize_args;
  auto* normalize_cmd = app.add_subcommand("normalize", "normalize a thermal frame");
  normalize_cmd->add_option("--input", normalize_args.input)->required();
  normalize_cmd->add_option("--out", normalize_args.out)->required();
  normalize_cmd->add_flag("--stats", normalize_args.stats, "print frame stats");
  normalize_args.flags.add_to(normalize_cmd);

  AugmentArgs augment_args;
  auto* augment_cmd = app.add_subcommand("augment", "visual-to-thermal augmentation");
  augment_cmd->add_option("--in", augment_args.in_dir)->required();
  augment_cmd->add_option("--out", augment_args.out_dir)->required();
  augment_cmd->add_option("--annotations", augment_args.annotations);
  augment_cmd->add_option("--seed", augment_args.seed);
  augment_cmd->add_option("--gamma-min", augment_args.gamma_min);
  augment_cmd->add_option("--gamma-max", augment_args.gamma_max);
  augment_cmd->add_option("--coeffs", augment_args.coeffs, "default|bt601");
  augment_cmd->add_flag("--negatives", augment_args.negatives);

  DetectArgs detect_args;
  auto* detect_cmd = app.add_subcommand("detect", "face detection on thermal frames");
  detect_cmd->add_option("--input", detect_args.input)->required();
  detect_cmd->add_option("--out", detect_args.out);
  detect_args.flags.add_to(detect_cmd);

  ScreenArgs screen_args;
  auto* screen_cmd = app.add_subcommand("screen", "fever/mask screening");
  screen_cmd->add_option("--input", screen_args.input)->required();
  screen_cmd->add_option("--dets", screen_args.dets, "detections file (JSONL)");
  screen_cmd->add_option("--masks", screen_args.masks, "external mask classifier file");
  screen_cmd->add_option("--out", screen_args.out);
  screen_args.flags.add_to(screen_cmd);

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "detection metric report");
  evaluate_cmd->add_option("--gt", evaluate_args.gt)->required();
  evaluate_cmd->add_option("--dets", evaluate_args.dets)->required();
  evaluate_cmd->add_option("--screening", evaluate_args.screening);
  evaluate_cmd->add_option("--manifest", evaluate_args.manifest);
  evaluate_cmd->add_flag("--by-lux", evaluate_args.by_lux);
  evaluate_cmd->add_flag("--json", evaluate_args.as_json);
  evaluate_cmd->add_option("--iou-threshold", evaluate_args.iou_threshold);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--n", synth_args.n);
  synth_cmd->add_option("--seed", synth_args.seed);
  synth_cmd->add_option("--out", synth_args.out)->required();
  synth_cmd->add_option("--scenario", synth_args.scenario,
                        "mixed|all-febrile|all-afebrile|all-masked|all-unmasked");
  synth_cmd->add_option("--noise-sigma", synth_args.noise_sigma);
  synth_cmd->add_option("--width", synth_args.width);
  synth_cmd->add_option("--height", synth_args.height);

  StreamArgs stream_args;
  auto* stream_cmd = app.add_subcommand("stream", "end-to-end screening over a dataset");
  stream_cmd->add_option("--dataset", stream_args.dataset)->required();
  stream_cmd->add_option("--events", stream_args.events, "event log path (JSONL)");
  stream_cmd->add_option("--summary", stream_args.summary, "summary CSV path");
  stream_args.flags.add_to(stream_cmd);

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "chronological 70:20:10 split");
  split_cmd->add_option("--manifest", split_args.manifest)->required();
  split_cmd->add_option("--out-dir", split_args.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (normalize_cmd->parsed()) return run_normalize(normalize_args);
    if (augment_cmd->parsed()) return run_augment(augment_args);
    if (detect_cmd->parsed()) return run_detect(detect_args);
    if (screen_cmd->parsed()) return run_screen(screen_args);
    if (evaluate_cmd->parsed()) return run_evaluate(evaluate_args);
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (stream_cmd->parsed()) return run_stream_cmd(stream_args);
    if (split_cmd->parsed()) return run_split(split_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace thermoscreen
