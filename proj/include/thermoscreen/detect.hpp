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

#include <algorithm>
#include <vector>

#include "thermoscreen/radiometric.hpp"
#include "thermoscreen/types.hpp"

namespace thermoscreen {

struct TemperatureBand {
  double lo = 30.0;
  double hi = 40.0;  // closed interval [lo, hi]
};

struct BaselineDetectorConfig {
  TemperatureBand body_band;
  double min_area = 64.0;          // pixels^2
  double aspect_ratio_min = 0.4;   // width / height
  double aspect_ratio_max = 1.6;
  double merge_gap = 2.0;          // pixels
  double reference_area = 900.0;   // pixels^2, confidence saturation point

  void validate() const {
    require(body_band.lo <= body_band.hi, "body band must be non-empty");
    require(min_area > 0, "min_area must be positive");
    require(aspect_ratio_min <= aspect_ratio_max, "aspect band must be non-empty");
  }
};

/// Pixel region from connected-component labeling: tight bounding box plus
/// pixel count.
struct PixelRegion {
  BoundingBox bbox;
  std::int64_t area = 0;  // number of true pixels
};

template <typename Scalar>
MaskXX threshold_body_band(const ThermalFrameT<Scalar>& frame,
                           const TemperatureBand& band) {
  frame.validate();
  return frame.temps.array() >= static_cast<Scalar>(band.lo) &&
         frame.temps.array() <= static_cast<Scalar>(band.hi);
}

/// 8-connected components of a binary mask, reported in (y_min, x_min) order.
inline std::vector<PixelRegion> connected_components(const MaskXX& mask) {
  const Eigen::Index rows = mask.rows();
  const Eigen::Index cols = mask.cols();
  require(rows > 0 && cols > 0, "mask must be non-empty");

  std::vector<std::int32_t> label(static_cast<std::size_t>(rows * cols), -1);
  auto idx = [cols](Eigen::Index r, Eigen::Index c) {
    return static_cast<std::size_t>(r * cols + c);
  };

  std::vector<PixelRegion> regions;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!mask(r, c) || label[idx(r, c)] >= 0) continue;
      const auto id = static_cast<std::int32_t>(regions.size());
      Eigen::Index x_min = c, x_max = c, y_min = r, y_max = r;
      std::int64_t area = 0;
      stack.push_back({r, c});
      label[idx(r, c)] = id;
      while (!stack.empty()) {
        auto [cr, cc] = stack.back();
        stack.pop_back();
        ++area;
        x_min = std::min(x_min, cc);
        x_max = std::max(x_max, cc);
        y_min = std::min(y_min, cr);
        y_max = std::max(y_max, cr);
        for (Eigen::Index dr = -1; dr <= 1; ++dr) {
          for (Eigen::Index dc = -1; dc <= 1; ++dc) {
            const Eigen::Index nr = cr + dr;
            const Eigen::Index nc = cc + dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            if (!mask(nr, nc) || label[idx(nr, nc)] >= 0) continue;
            label[idx(nr, nc)] = id;
            stack.push_back({nr, nc});
          }
        }
      }
      regions.push_back(PixelRegion{
          BoundingBox{static_cast<double>(x_min), static_cast<double>(y_min),
                      static_cast<double>(x_max + 1), static_cast<double>(y_max + 1)},
          area});
    }
  }
  std::sort(regions.begin(), regions.end(), [](const auto& a, const auto& b) {
    return std::tie(a.bbox.y_min, a.bbox.x_min) < std::tie(b.bbox.y_min, b.bbox.x_min);
  });
  return regions;
}

namespace detail {

inline double box_gap(const BoundingBox& a, const BoundingBox& b) {
  const double dx = std::max({0.0, a.x_min - b.x_max, b.x_min - a.x_max});
  const double dy = std::max({0.0, a.y_min - b.y_max, b.y_min - a.y_max});
  return std::max(dx, dy);
}

}  // namespace detail

/// Warm-region face detector. Faces are the warm complement of the scene;
/// the same physical signal that makes masks read as cold patches makes
/// faces read as 30-40 degC blobs. Stands in for trained detectors where
/// none is attached.
template <typename Scalar>
std::vector<Detection> detect_faces_baseline(const ThermalFrameT<Scalar>& frame,
                                             const BaselineDetectorConfig& cfg = {}) {
  cfg.validate();
  const MaskXX mask = threshold_body_band(frame, cfg.body_band);
  std::vector<PixelRegion> candidates;
  for (const PixelRegion& region : connected_components(mask)) {
    if (static_cast<double>(region.area) < cfg.min_area) continue;
    const double aspect = region.bbox.width() / region.bbox.height();
    if (aspect < cfg.aspect_ratio_min || aspect > cfg.aspect_ratio_max) continue;
    candidates.push_back(region);
  }

  // Merge candidates whose boxes sit closer than merge_gap (union box,
  // pixel areas summed), repeated to a fixed point.
  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    for (std::size_t i = 0; i < candidates.size() && !merged_any; ++i) {
      for (std::size_t j = i + 1; j < candidates.size(); ++j) {
        if (detail::box_gap(candidates[i].bbox, candidates[j].bbox) >= cfg.merge_gap)
          continue;
        candidates[i].bbox.x_min = std::min(candidates[i].bbox.x_min, candidates[j].bbox.x_min);
        candidates[i].bbox.y_min = std::min(candidates[i].bbox.y_min, candidates[j].bbox.y_min);
        candidates[i].bbox.x_max = std::max(candidates[i].bbox.x_max, candidates[j].bbox.x_max);
        candidates[i].bbox.y_max = std::max(candidates[i].bbox.y_max, candidates[j].bbox.y_max);
        candidates[i].area += candidates[j].area;
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(j));
        merged_any = true;
        break;
      }
    }
  }

  std::vector<Detection> detections;
  detections.reserve(candidates.size());
  for (const PixelRegion& region : candidates) {
    Detection det;
    det.frame_id = frame.frame_id;
    det.bbox = region.bbox;
    det.confidence = std::min(1.0, static_cast<double>(region.area) / cfg.reference_area);
    detections.push_back(det);
  }
  std::stable_sort(detections.begin(), detections.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.confidence > b.confidence;
                   });
  return detections;
}

}  // namespace thermoscreen
