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

#include <doctest.h>

#include "thermoscreen/data.hpp"
#include "thermoscreen/rng.hpp"
#include "thermoscreen/screen.hpp"

using namespace thermoscreen;

namespace {

ThermalFrame uniform_frame(double temp, Eigen::Index rows = 60, Eigen::Index cols = 80) {
  ThermalFrame frame;
  frame.temps = MatrixX<double>::Constant(rows, cols, temp);
  return frame;
}

SyntheticScene masked_scene(bool masked, double peak = 38.5) {
  SyntheticSceneConfig cfg;
  cfg.seed = 7;
  cfg.faces.push_back(SyntheticFace{160, 120, 10, 12, peak, masked});
  return generate_synthetic_frame(cfg);
}

}  // namespace

TEST_CASE("max_face_temperature basics") {
  const ThermalFrame frame = uniform_frame(30.0);
  CHECK(max_face_temperature(frame, {10, 10, 30, 30}) == 30.0);

  ThermalFrame spiked = frame;
  spiked.temps(15, 20) = 38.7;
  CHECK(max_face_temperature(spiked, {20, 15, 21, 16}) == 38.7);  // 1x1 box
  CHECK(max_face_temperature(spiked, {0, 0, 80, 60}) == 38.7);

  CHECK_THROWS(max_face_temperature(frame, {10, 10, 200, 30}));  // outside frame
  CHECK_THROWS(max_face_temperature(frame, {30, 10, 10, 30}));   // invalid box
}

TEST_CASE("max temperature in the synthetic face box approximates the peak") {
  const SyntheticScene scene = masked_scene(false, 38.2);
  const double max_temp = max_face_temperature(scene.frame, scene.annotations[0].bbox);
  CHECK(max_temp == doctest::Approx(38.2).epsilon(0.02));  // +- a few noise sigma
}

TEST_CASE("fever classification is the strict comparison") {
  CHECK(classify_fever(38.0));
  CHECK_FALSE(classify_fever(37.5));
  CHECK_FALSE(classify_fever(36.5));
  CHECK(classify_fever(37.5 + 1e-6));
  CHECK_THROWS(classify_fever(std::numeric_limits<double>::quiet_NaN()));

  // Property: exactly the reference predicate.
  Rng rng(3);
  ScreeningConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    const double t = rng.uniform(30.0, 45.0);
    CHECK(classify_fever(t, cfg) == (t > cfg.fever_threshold));
  }
}

TEST_CASE("mask heuristic on synthetic faces") {
  const SyntheticScene masked = masked_scene(true);
  const MaskVerdict on = classify_mask_heuristic(masked.frame, masked.annotations[0].bbox);
  CHECK(on.mask);
  CHECK(on.score > 2.0);

  const SyntheticScene unmasked = masked_scene(false);
  const MaskVerdict off =
      classify_mask_heuristic(unmasked.frame, unmasked.annotations[0].bbox);
  CHECK_FALSE(off.mask);
}

TEST_CASE("mask heuristic on a uniform box scores zero") {
  const ThermalFrame frame = uniform_frame(34.0);
  const MaskVerdict verdict = classify_mask_heuristic(frame, {10, 10, 40, 50});
  CHECK(verdict.score == 0.0);
  CHECK_FALSE(verdict.mask);
}

TEST_CASE("mask decision is invariant under a uniform temperature offset") {
  const SyntheticScene scene = masked_scene(true);
  ThermalFrame shifted = scene.frame;
  shifted.temps.array() += 4.2;
  const MaskVerdict a = classify_mask_heuristic(scene.frame, scene.annotations[0].bbox);
  const MaskVerdict b = classify_mask_heuristic(shifted, scene.annotations[0].bbox);
  CHECK(a.mask == b.mask);
  CHECK(a.score == doctest::Approx(b.score).epsilon(1e-9));
}

TEST_CASE("fever monotonicity: raising a pixel never clears fever") {
  SyntheticScene scene = masked_scene(false, 38.5);
  const BoundingBox box = scene.annotations[0].bbox;
  const double base = max_face_temperature(scene.frame, box);
  REQUIRE(classify_fever(base));
  scene.frame.temps(static_cast<Eigen::Index>(box.y_min) + 1,
                    static_cast<Eigen::Index>(box.x_min) + 1) += 5.0;
  CHECK(classify_fever(max_face_temperature(scene.frame, box)));
}

TEST_CASE("screen_frame produces one record per detection") {
  const ThermalFrame frame = uniform_frame(30.0);
  CHECK(screen_frame(frame, {}).empty());

  const SyntheticScene febrile = masked_scene(true, 38.5);
  const std::vector<Detection> dets{{0, febrile.annotations[0].bbox, 1.0}};
  const auto results = screen_frame(febrile.frame, dets);
  REQUIRE(results.size() == 1);
  CHECK(results[0].ok);
  CHECK(results[0].fever);
  CHECK(results[0].mask);

  const SyntheticScene healthy = masked_scene(false, 36.8);
  const std::vector<Detection> dets2{{0, healthy.annotations[0].bbox, 1.0}};
  const auto results2 = screen_frame(healthy.frame, dets2);
  REQUIRE(results2.size() == 1);
  CHECK_FALSE(results2[0].fever);
  CHECK_FALSE(results2[0].mask);
}

TEST_CASE("per-person failures do not abort the frame") {
  const SyntheticScene scene = masked_scene(false, 38.5);
  std::vector<Detection> dets;
  dets.push_back({0, {5, 5, 6, 6}, 0.5});  // 1x1: too small for mask regions
  dets.push_back({0, scene.annotations[0].bbox, 1.0});
  const auto results = screen_frame(scene.frame, dets);
  REQUIRE(results.size() == 2);
  CHECK_FALSE(results[0].ok);
  CHECK_FALSE(results[0].error.empty());
  CHECK(results[1].ok);
  CHECK(results[1].fever);
}
