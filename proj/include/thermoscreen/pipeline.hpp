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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thermoscreen/detect.hpp"
#include "thermoscreen/radiometric.hpp"
#include "thermoscreen/screen.hpp"

namespace thermoscreen {

struct PipelineConfig {
  NormalizationConfig normalization;
  BaselineDetectorConfig detector;
  std::optional<std::string> external_detector_cmd;  // replaces the baseline
  ScreeningConfig screening;
  double target_fps = 9.0;

  void validate() const {
    normalization.validate();
    detector.validate();
    screening.validate();
    require(target_fps > 0, "target_fps must be positive");
  }
};

/// One frame's screening outcome. The event log serializes every field
/// except processing latency; latency is wall time and would break the
/// byte-identical reproducibility of the log, so it only feeds the summary.
struct ScreeningEvent {
  std::int64_t frame_id = 0;
  std::int64_t timestamp_ms = 0;
  std::vector<PersonScreeningResult> persons;
  bool alert = false;  // any fever, or any person without a mask
  double processing_latency_ms = 0;
  bool ok = true;
  std::string error;
};

std::string format_event(const ScreeningEvent& event);
ScreeningEvent parse_event(const std::string& line);

struct StreamSummary {
  std::int64_t frames = 0;
  std::int64_t alerts = 0;
  double mean_latency_ms = 0;
  double max_latency_ms = 0;
  double fps = 0;
};

/// Header `frames,alerts,mean_latency_ms,max_latency_ms,fps` plus one row.
std::string format_summary_csv(const StreamSummary& summary);

/// Runs normalize -> detect -> screen over an ordered frame sequence,
/// emitting one event per frame in frame order. Per-frame failures become
/// error events; the stream never aborts.
StreamSummary run_stream(const std::vector<ThermalFrame>& frames,
                         const PipelineConfig& cfg, std::ostream& event_log);

/// Convenience: pull frames from a generated dataset directory (manifest
/// order; manifest timestamps and lux attached).
std::vector<ThermalFrame> load_dataset_frames(const std::filesystem::path& dir);

ScreeningEvent screen_one_frame(const ThermalFrame& frame, const PipelineConfig& cfg);

// Flat `key = value` configuration file; `#` comments. Every key has a CLI
// flag; precedence is flag > file > default.
std::map<std::string, std::string> parse_config_file(std::istream& in);
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file);
void apply_config(const std::map<std::string, std::string>& kv, PipelineConfig& cfg);

/// Runs an external detector subprocess with the frame path appended and
/// parses its stdout in the detection wire format.
std::vector<Detection> run_external_detector(const std::string& command,
                                             const std::filesystem::path& frame_path);

}  // namespace thermoscreen
