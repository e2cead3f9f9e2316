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
#include <iosfwd>
#include <string>
#include <vector>

#include "thermoscreen/types.hpp"

namespace thermoscreen {

/// Adapter wire format for externally trained detectors: newline-delimited
/// UTF-8, one JSON object per line with fields `frame_id` (integer), `bbox`
/// (array [x_min, y_min, x_max, y_max] in pixels) and `confidence` (number
/// in [0, 1]). Unknown fields are ignored. Blank lines are skipped.
std::vector<Detection> parse_external_detections(std::istream& in);
std::vector<Detection> parse_external_detections(const std::string& text);

std::string format_detection(const Detection& det);
void write_detections(std::ostream& out, const std::vector<Detection>& dets);

/// External mask-classifier record: same framing, `mask` (0|1) alongside
/// `bbox`.
struct ExternalMaskRecord {
  std::int64_t frame_id = 0;
  BoundingBox bbox;
  bool mask = false;
};

std::vector<ExternalMaskRecord> parse_external_masks(std::istream& in);

}  // namespace thermoscreen
