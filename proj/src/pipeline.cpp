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

#include "thermoscreen/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thermoscreen/data.hpp"
#include "thermoscreen/detect_io.hpp"

namespace thermoscreen {

namespace {

using nlohmann::json;

json person_to_json(const PersonScreeningResult& p) {
  json obj;
  obj["bbox"] = {p.bbox.x_min, p.bbox.y_min, p.bbox.x_max, p.bbox.y_max};
  obj["max_temp"] = p.max_temp;
  obj["fever"] = p.fever;
  obj["mask"] = p.mask;
  obj["mask_score"] = p.mask_score;
  obj["ok"] = p.ok;
  if (!p.ok) obj["error"] = p.error;
  return obj;
}

PersonScreeningResult person_from_json(const json& obj, std::int64_t frame_id) {
  PersonScreeningResult p;
  p.frame_id = frame_id;
  const auto& box = obj.at("bbox");
  p.bbox = BoundingBox{box.at(0).get<double>(), box.at(1).get<double>(),
                       box.at(2).get<double>(), box.at(3).get<double>()};
  p.max_temp = obj.at("max_temp").get<double>();
  p.fever = obj.at("fever").get<bool>();
  p.mask = obj.at("mask").get<bool>();
  p.mask_score = obj.at("mask_score").get<double>();
  p.ok = obj.at("ok").get<bool>();
  if (obj.contains("error")) p.error = obj["error"].get<std::string>();
  return p;
}

}  // namespace

std::string format_event(const ScreeningEvent& event) {
  json obj;
  obj["frame_id"] = event.frame_id;
  obj["timestamp"] = event.timestamp_ms;
  obj["alert"] = event.alert;
  obj["ok"] = event.ok;
  if (!event.ok) obj["error"] = event.error;
  json persons = json::array();
  for (const PersonScreeningResult& p : event.persons) persons.push_back(person_to_json(p));
  obj["persons"] = persons;
  return obj.dump();
}

ScreeningEvent parse_event(const std::string& line) {
  const json obj = json::parse(line);
  ScreeningEvent event;
  event.frame_id = obj.at("frame_id").get<std::int64_t>();
  event.timestamp_ms = obj.at("timestamp").get<std::int64_t>();
  event.alert = obj.at("alert").get<bool>();
  event.ok = obj.at("ok").get<bool>();
  if (obj.contains("error")) event.error = obj["error"].get<std::string>();
  for (const json& p : obj.at("persons"))
    event.persons.push_back(person_from_json(p, event.frame_id));
  return event;
}

std::string format_summary_csv(const StreamSummary& summary) {
  std::ostringstream out;
  out << "frames,alerts,mean_latency_ms,max_latency_ms,fps\n"
      << summary.frames << ',' << summary.alerts << ',' << summary.mean_latency_ms
      << ',' << summary.max_latency_ms << ',' << summary.fps << '\n';
  return out.str();
}

ScreeningEvent screen_one_frame(const ThermalFrame& frame, const PipelineConfig& cfg) {
  ScreeningEvent event;
  event.frame_id = frame.frame_id;
  event.timestamp_ms = frame.timestamp_ms;
  try {
    // Normalization feeds display/export; detection and screening operate on
    // the radiometric values directly.
    (void)normalize_frame(frame, cfg.normalization);
    const std::vector<Detection> detections = detect_faces_baseline(frame, cfg.detector);
    event.persons = screen_frame(frame, detections, cfg.screening);
    for (const PersonScreeningResult& p : event.persons)
      if (p.ok && (p.fever || !p.mask)) event.alert = true;
  } catch (const std::exception& e) {
    event.ok = false;
    event.error = e.what();
  }
  return event;
}

StreamSummary run_stream(const std::vector<ThermalFrame>& frames,
                         const PipelineConfig& cfg, std::ostream& event_log) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  StreamSummary summary;
  double latency_sum = 0;
  const auto run_start = clock::now();
  for (const ThermalFrame& frame : frames) {
    const auto t0 = clock::now();
    ScreeningEvent event = screen_one_frame(frame, cfg);
    event.processing_latency_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    event_log << format_event(event) << '\n';
    ++summary.frames;
    if (event.alert) ++summary.alerts;
    latency_sum += event.processing_latency_ms;
    summary.max_latency_ms = std::max(summary.max_latency_ms, event.processing_latency_ms);
  }
  const double elapsed_s =
      std::chrono::duration<double>(clock::now() - run_start).count();
  if (summary.frames > 0) {
    summary.mean_latency_ms = latency_sum / static_cast<double>(summary.frames);
    summary.fps = elapsed_s > 0 ? static_cast<double>(summary.frames) / elapsed_s : 0;
  }
  return summary;
}

std::vector<ThermalFrame> load_dataset_frames(const std::filesystem::path& dir) {
  const std::vector<ManifestEntry> manifest = parse_manifest(dir / "manifest.txt");
  std::vector<ThermalFrame> frames;
  frames.reserve(manifest.size());
  for (const ManifestEntry& entry : manifest) {
    ThermalFrame frame = load_thermal_frame(dir / entry.image_name);
    frame.timestamp_ms = entry.timestamp_ms;
    frame.lux = entry.lux;
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::map<std::string, std::string> parse_config_file(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected 'key = value'");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config file " + file.string());
  return parse_config_file(in);
}

void apply_config(const std::map<std::string, std::string>& kv, PipelineConfig& cfg) {
  auto number = [&](const char* key, double& target) {
    if (auto it = kv.find(key); it != kv.end()) target = std::stod(it->second);
  };
  number("normalization.lower_clamp", cfg.normalization.lower_clamp);
  number("normalization.upper_clamp", cfg.normalization.upper_clamp);
  if (auto it = kv.find("normalization.mode"); it != kv.end()) {
    if (it->second == "band_clamp")
      cfg.normalization.mode = NormalizationMode::kBandClamp;
    else if (it->second == "literal")
      cfg.normalization.mode = NormalizationMode::kLiteral;
    else
      throw std::runtime_error("normalization.mode must be band_clamp or literal");
  }
  number("detector.body_band_lo", cfg.detector.body_band.lo);
  number("detector.body_band_hi", cfg.detector.body_band.hi);
  number("detector.min_area", cfg.detector.min_area);
  number("detector.aspect_ratio_min", cfg.detector.aspect_ratio_min);
  number("detector.aspect_ratio_max", cfg.detector.aspect_ratio_max);
  number("detector.merge_gap", cfg.detector.merge_gap);
  if (auto it = kv.find("detector.external_command"); it != kv.end())
    cfg.external_detector_cmd = it->second;
  number("screening.fever_threshold", cfg.screening.fever_threshold);
  number("screening.mask_delta_threshold", cfg.screening.mask_delta_threshold);
  number("screening.upper_face_fraction", cfg.screening.upper_face_fraction);
  number("screening.lower_face_fraction", cfg.screening.lower_face_fraction);
  number("target_fps", cfg.target_fps);
}

std::vector<Detection> run_external_detector(const std::string& command,
                                             const std::filesystem::path& frame_path) {
  const std::string full = command + " " + frame_path.string();
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) throw std::runtime_error("failed to launch external detector: " + full);
  std::string output;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) output.append(buffer, got);
  const int status = pclose(pipe);
  if (status != 0)
    throw std::runtime_error("external detector exited with status " +
                             std::to_string(status));
  return parse_external_detections(output);
}

}  // namespace thermoscreen
