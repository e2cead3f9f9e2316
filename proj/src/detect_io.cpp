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

#include "thermoscreen/detect_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace thermoscreen {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

json parse_line(const std::string& line, std::size_t line_no) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) fail(line_no, "malformed record");
  return obj;
}

std::int64_t read_frame_id(const json& obj, std::size_t line_no) {
  if (!obj.contains("frame_id") || !obj["frame_id"].is_number_integer())
    fail(line_no, "field 'frame_id' missing or not an integer");
  return obj["frame_id"].get<std::int64_t>();
}

BoundingBox read_bbox(const json& obj, std::size_t line_no) {
  if (!obj.contains("bbox") || !obj["bbox"].is_array() || obj["bbox"].size() != 4)
    fail(line_no, "field 'bbox' missing or not a 4-element array");
  for (const auto& v : obj["bbox"])
    if (!v.is_number()) fail(line_no, "field 'bbox' has a non-numeric entry");
  BoundingBox box{obj["bbox"][0].get<double>(), obj["bbox"][1].get<double>(),
                  obj["bbox"][2].get<double>(), obj["bbox"][3].get<double>()};
  if (!box.valid()) fail(line_no, "field 'bbox' violates box invariants");
  return box;
}

}  // namespace

std::vector<Detection> parse_external_detections(std::istream& in) {
  std::vector<Detection> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json obj = parse_line(line, line_no);
    Detection det;
    det.frame_id = read_frame_id(obj, line_no);
    det.bbox = read_bbox(obj, line_no);
    if (!obj.contains("confidence") || !obj["confidence"].is_number())
      fail(line_no, "field 'confidence' missing or not a number");
    det.confidence = obj["confidence"].get<double>();
    if (det.confidence < 0.0 || det.confidence > 1.0)
      fail(line_no, "confidence out of range");
    out.push_back(det);
  }
  return out;
}

std::vector<Detection> parse_external_detections(const std::string& text) {
  std::istringstream in(text);
  return parse_external_detections(in);
}

std::string format_detection(const Detection& det) {
  json obj;
  obj["frame_id"] = det.frame_id;
  obj["bbox"] = {det.bbox.x_min, det.bbox.y_min, det.bbox.x_max, det.bbox.y_max};
  obj["confidence"] = det.confidence;
  return obj.dump();
}

void write_detections(std::ostream& out, const std::vector<Detection>& dets) {
  for (const Detection& det : dets) out << format_detection(det) << '\n';
}

std::vector<ExternalMaskRecord> parse_external_masks(std::istream& in) {
  std::vector<ExternalMaskRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json obj = parse_line(line, line_no);
    ExternalMaskRecord rec;
    rec.frame_id = read_frame_id(obj, line_no);
    rec.bbox = read_bbox(obj, line_no);
    if (!obj.contains("mask") || !obj["mask"].is_number_integer())
      fail(line_no, "field 'mask' missing or not 0|1");
    const auto flag = obj["mask"].get<std::int64_t>();
    if (flag != 0 && flag != 1) fail(line_no, "field 'mask' must be 0 or 1");
    rec.mask = flag == 1;
    out.push_back(rec);
  }
  return out;
}

}  // namespace thermoscreen
