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

#include <array>
#include <cmath>

#include "thermoscreen/rng.hpp"
#include "thermoscreen/types.hpp"

namespace thermoscreen {

template <typename Scalar>
struct RgbImageT {
  MatrixX<Scalar> r, g, b;  // each channel in [0, 1]

  Eigen::Index width() const { return r.cols(); }
  Eigen::Index height() const { return r.rows(); }

  void validate() const {
    require(r.rows() > 0 && r.cols() > 0, "rgb image must be non-empty");
    require(r.rows() == g.rows() && r.cols() == g.cols() &&
                r.rows() == b.rows() && r.cols() == b.cols(),
            "rgb channels must share dimensions");
  }
};

template <typename Scalar>
struct GrayImageT {
  MatrixX<Scalar> pixels;  // in [0, 1]

  Eigen::Index width() const { return pixels.cols(); }
  Eigen::Index height() const { return pixels.rows(); }
};

using RgbImage = RgbImageT<double>;
using GrayImage = GrayImageT<double>;

struct GrayCoefficients {
  double r = 0.229;  // as printed; BT.601 proper would be 0.299
  double g = 0.587;
  double b = 0.114;
};

inline constexpr GrayCoefficients kDefaultGrayCoefficients{0.229, 0.587, 0.114};
inline constexpr GrayCoefficients kBt601GrayCoefficients{0.299, 0.587, 0.114};

struct AugmentConfig {
  GrayCoefficients gray_coefficients = kDefaultGrayCoefficients;
  double gamma_min = 0.3;
  double gamma_max = 0.9;
  std::uint64_t seed = 0;
  bool emit_negatives = true;  // mask-classifier crops only

  void validate() const {
    require(gamma_min > 0 && gamma_max >= gamma_min, "gamma range must be positive");
    require(gray_coefficients.r >= 0 && gray_coefficients.g >= 0 &&
                gray_coefficients.b >= 0,
            "gray coefficients must be non-negative");
  }
};

template <typename Scalar>
GrayImageT<Scalar> rgb_to_gray(const RgbImageT<Scalar>& img,
                               const GrayCoefficients& coeffs = kDefaultGrayCoefficients) {
  img.validate();
  GrayImageT<Scalar> out;
  out.pixels = (coeffs.r * img.r.array() + coeffs.g * img.g.array() +
                coeffs.b * img.b.array())
                   .cwiseMax(Scalar(0))
                   .cwiseMin(Scalar(1))
                   .matrix();
  return out;
}

/// Power-law transform O = I^(1/g) on the [0, 1] scale. g in (0, 1) darkens,
/// g = 1 is the identity.
template <typename Scalar>
GrayImageT<Scalar> gamma_correct(const GrayImageT<Scalar>& img, double g) {
  require(g > 0, "gamma must be positive");
  GrayImageT<Scalar> out;
  if (g == 1.0) {
    out.pixels = img.pixels;
    return out;
  }
  const Scalar exponent = static_cast<Scalar>(1.0 / g);
  out.pixels = img.pixels.array().pow(exponent).cwiseMin(Scalar(1)).matrix();
  return out;
}

template <typename Scalar>
GrayImageT<Scalar> negate(const GrayImageT<Scalar>& img) {
  GrayImageT<Scalar> out;
  out.pixels = (Scalar(1) - img.pixels.array()).matrix();
  return out;
}

/// Two-step visual-to-thermal-lookalike rule: grayscale conversion followed
/// by gamma correction with one gamma drawn per image from the configured
/// range. Deterministic given (img, cfg, rng state).
template <typename Scalar>
GrayImageT<Scalar> augment_image(const RgbImageT<Scalar>& img,
                                 const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  GrayImageT<Scalar> gray = rgb_to_gray(img, cfg.gray_coefficients);
  const double gamma = rng.uniform(cfg.gamma_min, cfg.gamma_max);
  return gamma_correct(gray, gamma);
}

}  // namespace thermoscreen
