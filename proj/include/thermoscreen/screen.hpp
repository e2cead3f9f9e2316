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

#include <cmath>
#include <string>
#include <vector>

#include "thermoscreen/radiometric.hpp"
#include "thermoscreen/types.hpp"

namespace thermoscreen {

struct ScreeningConfig {
  double fever_threshold = 37.5;      // degC, strict comparison
  double mask_delta_threshold = 2.0;  // degC, upper-minus-lower mean
  double upper_face_fraction = 0.40;  // of box height, from the top
  double lower_face_fraction = 0.45;  // of box height, from the bottom

  void validate() const {
    require(std::isfinite(fever_threshold) && std::isfinite(mask_delta_threshold),
            "screening thresholds must be finite");
    require(upper_face_fraction > 0 && upper_face_fraction < 1 &&
                lower_face_fraction > 0 && lower_face_fraction < 1 &&
                upper_face_fraction + lower_face_fraction <= 1,
            "face fractions must lie in (0,1) and sum to at most 1");
  }
};

struct PersonScreeningResult {
  std::int64_t frame_id = 0;
  BoundingBox bbox;
  double max_temp = 0;    // degC
  bool fever = false;
  bool mask = false;
  double mask_score = 0;  // degC, upper-region mean minus lower-region mean
  bool ok = true;         // false => per-person failure, see `error`
  std::string error;
};

namespace detail {

template <typename Scalar>
struct PixelSpan {
  Eigen::Index row0, rows, col0, cols;
};

// Integer pixel window covered by a (half-open) box, clipped to the frame.
template <typename Scalar>
PixelSpan<Scalar> box_span(const ThermalFrameT<Scalar>& frame, const BoundingBox& box) {
  require(box.valid(), "bounding box invalid");
  require(box.x_min >= 0 && box.y_min >= 0 &&
              box.x_max <= static_cast<double>(frame.width()) &&
              box.y_max <= static_cast<double>(frame.height()),
          "bounding box outside frame");
  const auto row0 = static_cast<Eigen::Index>(std::floor(box.y_min));
  const auto col0 = static_cast<Eigen::Index>(std::floor(box.x_min));
  const auto row1 = static_cast<Eigen::Index>(std::ceil(box.y_max));
  const auto col1 = static_cast<Eigen::Index>(std::ceil(box.x_max));
  require(row1 > row0 && col1 > col0, "bounding box covers no pixels");
  return {row0, row1 - row0, col0, col1 - col0};
}

}  // namespace detail

/// Full-face maximum temperature, the body-temperature proxy.
template <typename Scalar>
double max_face_temperature(const ThermalFrameT<Scalar>& frame, const BoundingBox& box) {
  frame.validate();
  const auto span = detail::box_span(frame, box);
  return static_cast<double>(
      frame.temps.block(span.row0, span.col0, span.rows, span.cols).maxCoeff());
}

/// High-grade fever iff the maximum face temperature strictly exceeds the
/// threshold (37.5 degC by default).
inline bool classify_fever(double max_temp, const ScreeningConfig& cfg = {}) {
  require(std::isfinite(max_temp), "temperature must be finite");
  return max_temp > cfg.fever_threshold;
}

struct MaskVerdict {
  bool mask = false;
  double score = 0;  // degC
};

/// Mask-as-cold-patch heuristic: mask cloth attenuates the infrared signal,
/// so a worn mask reads several degC cooler than the forehead. The score is
/// mean(upper region) - mean(lower region) over the face box.
template <typename Scalar>
MaskVerdict classify_mask_heuristic(const ThermalFrameT<Scalar>& frame,
                                    const BoundingBox& box,
                                    const ScreeningConfig& cfg = {}) {
  frame.validate();
  cfg.validate();
  const auto span = detail::box_span(frame, box);
  const auto upper_rows =
      static_cast<Eigen::Index>(std::floor(span.rows * cfg.upper_face_fraction));
  const auto lower_rows =
      static_cast<Eigen::Index>(std::floor(span.rows * cfg.lower_face_fraction));
  require(upper_rows >= 1 && lower_rows >= 1,
          "face box too small for mask regions");

  const double upper_mean = static_cast<double>(
      frame.temps.block(span.row0, span.col0, upper_rows, span.cols).mean());
  const double lower_mean = static_cast<double>(
      frame.temps
          .block(span.row0 + span.rows - lower_rows, span.col0, lower_rows, span.cols)
          .mean());
  const double score = upper_mean - lower_mean;
  return MaskVerdict{score > cfg.mask_delta_threshold, score};
}

/// Screens every detection of one frame. Per-person failures (degenerate
/// boxes and the like) become failure records; the frame never aborts.
template <typename Scalar>
std::vector<PersonScreeningResult> screen_frame(const ThermalFrameT<Scalar>& frame,
                                                const std::vector<Detection>& detections,
                                                const ScreeningConfig& cfg = {}) {
  cfg.validate();
  std::vector<PersonScreeningResult> results;
  results.reserve(detections.size());
  for (const Detection& det : detections) {
    PersonScreeningResult res;
    res.frame_id = frame.frame_id;
    res.bbox = det.bbox;
    try {
      res.max_temp = max_face_temperature(frame, det.bbox);
      res.fever = classify_fever(res.max_temp, cfg);
      const MaskVerdict verdict = classify_mask_heuristic(frame, det.bbox, cfg);
      res.mask = verdict.mask;
      res.mask_score = verdict.score;
    } catch (const std::exception& e) {
      res.ok = false;
      res.error = e.what();
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace thermoscreen
