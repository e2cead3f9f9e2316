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
#include <iosfwd>
#include <string>
#include <vector>

#include "thermoscreen/augment.hpp"
#include "thermoscreen/evaluate.hpp"
#include "thermoscreen/radiometric.hpp"
#include "thermoscreen/types.hpp"

namespace thermoscreen {

// ---------------------------------------------------------------------------
// Ground truth. One record per line, space-separated:
//   image_name x_min y_min x_max y_max mask
// `#` starts a comment line; blank lines are skipped; UTF-8.
// ---------------------------------------------------------------------------

struct GroundTruthRecord {
  std::string image_name;
  std::int64_t x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  bool mask = false;

  BoundingBox bbox() const {
    return BoundingBox{static_cast<double>(x_min), static_cast<double>(y_min),
                       static_cast<double>(x_max), static_cast<double>(y_max)};
  }
  bool operator==(const GroundTruthRecord&) const = default;
};

std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in);
std::vector<GroundTruthRecord> parse_ground_truth(const std::filesystem::path& file);

/// Writes records sorted by (image_name, y_min, x_min); round-trips through
/// parse_ground_truth.
void write_ground_truth(std::vector<GroundTruthRecord> records, std::ostream& out);
void write_ground_truth(std::vector<GroundTruthRecord> records,
                        const std::filesystem::path& file);

/// Resolves the ground-truth file inside a dataset directory; both
/// `ground_truth.txt` and `ground truth.txt` are accepted.
std::filesystem::path find_ground_truth_file(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Manifest: `image_name lux timestamp` lines, same comment rules.
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string image_name;
  double lux = 0;
  std::int64_t timestamp_ms = 0;
};

std::vector<ManifestEntry> parse_manifest(std::istream& in);
std::vector<ManifestEntry> parse_manifest(const std::filesystem::path& file);
void write_manifest(const std::vector<ManifestEntry>& entries, std::ostream& out);

// ---------------------------------------------------------------------------
// Rasters: binary netpbm (PGM P5 for gray, PPM P6 for color), maxval 255.
// ---------------------------------------------------------------------------

ByteImage read_pgm(const std::filesystem::path& file);
void write_pgm(const ByteImage& img, const std::filesystem::path& file);

struct RgbBytes {
  ByteImage r, g, b;
};

RgbBytes read_ppm(const std::filesystem::path& file);

RgbImage rgb_bytes_to_unit(const RgbBytes& bytes);

// ---------------------------------------------------------------------------
// Radiometric sidecar `<stem>.temps`: little-endian uint32 width, uint32
// height, then width*height float32 temperatures row-major.
// ---------------------------------------------------------------------------

void write_temps(const MatrixX<double>& temps, const std::filesystem::path& file);
MatrixX<double> read_temps(const std::filesystem::path& file);

struct LoadOptions {
  // Affine byte -> degC map used when only an 8-bit raster is available.
  double fallback_lo = 20.0;
  double fallback_hi = 45.0;
};

/// Loads a thermal frame. A `<stem>.temps` sidecar is authoritative; without
/// one, the 8-bit gray raster is mapped affinely onto the configured band.
/// frame_id is taken from the trailing digits of the file stem when present.
ThermalFrame load_thermal_frame(const std::filesystem::path& image_path,
                                const LoadOptions& opts = {});

std::int64_t frame_id_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Synthetic thermal scenes: the deterministic oracle for the screening
// heuristics. Faces are 2D Gaussian bumps over an ambient background; a
// masked face has the lower fraction of its ground-truth box offset by
// mask_offset before noise.
// ---------------------------------------------------------------------------

struct SyntheticFace {
  double center_x = 0, center_y = 0;  // integer-valued centers hit the peak exactly
  double radius_x = 10, radius_y = 12;
  double peak_temp = 37.0;  // degC
  bool masked = false;
  double mask_offset = -6.0;  // degC applied to the lower face region
};

struct SyntheticSceneConfig {
  Eigen::Index width = 320, height = 240;
  double ambient_temp = 22.0;
  std::vector<SyntheticFace> faces;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
  double lower_face_fraction = 0.45;  // matches the screening geometry
};

struct SyntheticScene {
  ThermalFrame frame;
  std::vector<Annotation> annotations;  // one per face, in face order
};

/// Ground-truth box of a face: tight box of the noiseless signal's pixels at
/// or above the half-maximum contour. The box is defined by the signal model;
/// individual noise draws do not move it.
BoundingBox synthetic_face_box(const SyntheticFace& face, double ambient,
                               Eigen::Index width, Eigen::Index height);

SyntheticScene generate_synthetic_frame(const SyntheticSceneConfig& cfg);

enum class Scenario { kMixed, kAllFebrile, kAllAfebrile, kAllMasked, kAllUnmasked };

Scenario scenario_from_string(const std::string& name);

struct DatasetGenConfig {
  std::int64_t n = 200;
  std::uint64_t seed = 42;
  Scenario scenario = Scenario::kMixed;
  Eigen::Index width = 320, height = 240;
  double ambient_temp = 22.0;
  double noise_sigma = 0.1;
  std::filesystem::path out_dir;
};

/// Per-face truth the ground-truth grammar cannot carry (peak temperature);
/// written to `faces.txt` alongside the dataset.
struct SyntheticFaceTruth {
  std::string image_name;
  BoundingBox bbox;
  double peak_temp = 0;
  bool masked = false;
};

struct GeneratedDataset {
  std::vector<std::string> image_names;
  std::vector<SyntheticFaceTruth> faces;
};

/// Writes n frames (PGM raster + .temps sidecar), ground_truth.txt,
/// manifest.txt (lux labels cycling the four buckets) and faces.txt.
/// Byte-for-byte reproducible per seed.
GeneratedDataset generate_synthetic_dataset(const DatasetGenConfig& cfg);

std::vector<SyntheticFaceTruth> parse_face_truths(const std::filesystem::path& file);

}  // namespace thermoscreen
