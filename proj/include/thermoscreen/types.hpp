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

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace thermoscreen {

// Images are stored row-major so that temps(r, c) addresses pixel (x=c, y=r)
// in the same order the raster formats serialize them.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MaskXX = ArrayXX<bool>;
using ByteImage = MatrixX<std::uint8_t>;

/// Axis-aligned box, half-open: a pixel (x, y) is inside iff
/// x_min <= x < x_max and y_min <= y < y_max.
struct BoundingBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  bool valid() const {
    return x_min >= 0 && y_min >= 0 && x_max > x_min && y_max > y_min;
  }

  bool operator==(const BoundingBox&) const = default;
};

struct Detection {
  std::int64_t frame_id = 0;
  BoundingBox bbox;
  double confidence = 0;  // in [0, 1]
};

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace thermoscreen
