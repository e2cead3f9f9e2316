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
#include <cstdint>
#include <optional>

#include "thermoscreen/types.hpp"

namespace thermoscreen {

/// A calibrated thermal frame: every entry of `temps` is a temperature in
/// degrees Celsius. Lux is camera-side metadata only; the pixels themselves
/// carry no illumination dependence.
template <typename Scalar>
struct ThermalFrameT {
  std::int64_t frame_id = 0;
  std::int64_t timestamp_ms = 0;
  std::optional<double> lux;
  MatrixX<Scalar> temps;

  Eigen::Index width() const { return temps.cols(); }
  Eigen::Index height() const { return temps.rows(); }

  void validate() const {
    require(temps.rows() > 0 && temps.cols() > 0, "thermal frame must be non-empty");
    require(temps.allFinite(), "thermal frame contains non-finite temperatures");
  }
};

template <typename Scalar>
struct NormalizedImageT {
  MatrixX<Scalar> pixels;  // every entry in [0, 1]

  Eigen::Index width() const { return pixels.cols(); }
  Eigen::Index height() const { return pixels.rows(); }
};

using ThermalFrame = ThermalFrameT<double>;
using NormalizedImage = NormalizedImageT<double>;

enum class NormalizationMode {
  /// Clamp the frame's min/max into the [lower, upper] band and map the
  /// clamped band affinely onto [0, 1]. The default; always lands in [0, 1].
  kBandClamp,
  /// The printed form (T - L) / U, clamped to [0, 1] afterwards. Kept for
  /// fidelity experiments.
  kLiteral,
};

struct NormalizationConfig {
  double lower_clamp = 20.0;
  double upper_clamp = 45.0;
  NormalizationMode mode = NormalizationMode::kBandClamp;

  void validate() const {
    require(lower_clamp < upper_clamp, "lower_clamp must be below upper_clamp");
  }
};

/// Temperature-constrained normalization. Scene objects far outside the
/// body band (a hot kettle, a cold window) no longer wash out facial
/// contrast: the effective range is narrowed to
/// [max(min T, lower), min(max T, upper)] before mapping onto [0, 1].
template <typename Scalar>
NormalizedImageT<Scalar> normalize_frame(const ThermalFrameT<Scalar>& frame,
                                         const NormalizationConfig& cfg = {}) {
  frame.validate();
  cfg.validate();
  const Scalar t_min = frame.temps.minCoeff();
  const Scalar t_max = frame.temps.maxCoeff();
  const Scalar lo = std::max<Scalar>(t_min, static_cast<Scalar>(cfg.lower_clamp));
  const Scalar hi = std::min<Scalar>(t_max, static_cast<Scalar>(cfg.upper_clamp));

  NormalizedImageT<Scalar> out;
  if (cfg.mode == NormalizationMode::kLiteral) {
    out.pixels = ((frame.temps.array() - lo) / hi)
                     .cwiseMax(Scalar(0))
                     .cwiseMin(Scalar(1))
                     .matrix();
    return out;
  }
  if (hi <= lo) {
    // Degenerate band (e.g. uniform frame): mid-gray everywhere.
    out.pixels = MatrixX<Scalar>::Constant(frame.temps.rows(), frame.temps.cols(),
                                           Scalar(0.5));
    return out;
  }
  out.pixels = ((frame.temps.array().cwiseMax(lo).cwiseMin(hi) - lo) / (hi - lo)).matrix();
  return out;
}

struct FrameStats {
  double min = 0;
  double max = 0;
  double mean = 0;
};

template <typename Scalar>
FrameStats frame_stats(const ThermalFrameT<Scalar>& frame) {
  frame.validate();
  return FrameStats{static_cast<double>(frame.temps.minCoeff()),
                    static_cast<double>(frame.temps.maxCoeff()),
                    static_cast<double>(frame.temps.mean())};
}

/// 8-bit export with round-half-up so the mapping is identical on every
/// platform (std::round rounds half away from zero; for non-negative input
/// the two agree, but the intent is pinned here).
template <typename Scalar>
ByteImage to_byte_image(const NormalizedImageT<Scalar>& img) {
  ByteImage out(img.pixels.rows(), img.pixels.cols());
  for (Eigen::Index r = 0; r < img.pixels.rows(); ++r)
    for (Eigen::Index c = 0; c < img.pixels.cols(); ++c) {
      const double scaled = std::floor(static_cast<double>(img.pixels(r, c)) * 255.0 + 0.5);
      out(r, c) = static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
    }
  return out;
}

}  // namespace thermoscreen
