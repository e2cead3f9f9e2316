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

#include "thermoscreen/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "thermoscreen/rng.hpp"

namespace thermoscreen {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  fail("line " + std::to_string(line_no) + ": " + what);
}

bool is_comment_or_blank(const std::string& line) {
  for (const char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::ifstream open_input(const fs::path& file, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(file, mode);
  if (!in) fail("cannot open " + file.string());
  return in;
}

std::ofstream open_output(const fs::path& file, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(file, mode);
  if (!out) fail("cannot open " + file.string() + " for writing");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------

std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in) {
  std::vector<GroundTruthRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream fields(line);
    GroundTruthRecord rec;
    int mask_flag = -1;
    if (!(fields >> rec.image_name >> rec.x_min >> rec.y_min >> rec.x_max >>
          rec.y_max >> mask_flag))
      fail_line(line_no, "expected 'image_name x_min y_min x_max y_max mask'");
    std::string trailing;
    if (fields >> trailing) fail_line(line_no, "unexpected trailing field '" + trailing + "'");
    if (rec.x_max <= rec.x_min) fail_line(line_no, "x_max <= x_min");
    if (rec.y_max <= rec.y_min) fail_line(line_no, "y_max <= y_min");
    if (rec.x_min < 0 || rec.y_min < 0) fail_line(line_no, "negative box coordinate");
    if (mask_flag != 0 && mask_flag != 1) fail_line(line_no, "mask must be 0 or 1");
    rec.mask = mask_flag == 1;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<GroundTruthRecord> parse_ground_truth(const fs::path& file) {
  auto in = open_input(file);
  return parse_ground_truth(in);
}

void write_ground_truth(std::vector<GroundTruthRecord> records, std::ostream& out) {
  std::stable_sort(records.begin(), records.end(),
                   [](const GroundTruthRecord& a, const GroundTruthRecord& b) {
                     return std::tie(a.image_name, a.y_min, a.x_min) <
                            std::tie(b.image_name, b.y_min, b.x_min);
                   });
  for (const GroundTruthRecord& rec : records) {
    require(rec.x_max > rec.x_min && rec.y_max > rec.y_min && rec.x_min >= 0 &&
                rec.y_min >= 0,
            "ground-truth record violates box invariants");
    out << rec.image_name << ' ' << rec.x_min << ' ' << rec.y_min << ' ' << rec.x_max
        << ' ' << rec.y_max << ' ' << (rec.mask ? 1 : 0) << '\n';
  }
}

void write_ground_truth(std::vector<GroundTruthRecord> records, const fs::path& file) {
  auto out = open_output(file);
  write_ground_truth(std::move(records), out);
  if (!out) fail("write failed: " + file.string());
}

fs::path find_ground_truth_file(const fs::path& dir) {
  for (const char* name : {"ground_truth.txt", "ground truth.txt"}) {
    const fs::path candidate = dir / name;
    if (fs::exists(candidate)) return candidate;
  }
  fail("no ground_truth.txt (or 'ground truth.txt') in " + dir.string());
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

std::vector<ManifestEntry> parse_manifest(std::istream& in) {
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream fields(line);
    ManifestEntry entry;
    if (!(fields >> entry.image_name >> entry.lux >> entry.timestamp_ms))
      fail_line(line_no, "expected 'image_name lux timestamp'");
    if (entry.lux < 0) fail_line(line_no, "lux must be non-negative");
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ManifestEntry> parse_manifest(const fs::path& file) {
  auto in = open_input(file);
  return parse_manifest(in);
}

void write_manifest(const std::vector<ManifestEntry>& entries, std::ostream& out) {
  for (const ManifestEntry& entry : entries) {
    std::ostringstream lux;
    lux << entry.lux;
    out << entry.image_name << ' ' << lux.str() << ' ' << entry.timestamp_ms << '\n';
  }
}

// ---------------------------------------------------------------------------
// Netpbm rasters
// ---------------------------------------------------------------------------

namespace {

struct PnmHeader {
  Eigen::Index width = 0, height = 0;
};

PnmHeader read_pnm_header(std::istream& in, const char* magic, const fs::path& file) {
  std::string token;
  in >> token;
  if (token != magic) fail(file.string() + ": expected " + magic + " raster");
  auto next_token = [&in]() {
    std::string t;
    in >> t;
    while (!t.empty() && t[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      in >> t;
    }
    return t;
  };
  PnmHeader header;
  header.width = std::stoll(next_token());
  header.height = std::stoll(next_token());
  const long long maxval = std::stoll(next_token());
  if (header.width <= 0 || header.height <= 0) fail(file.string() + ": bad dimensions");
  if (maxval != 255) fail(file.string() + ": only maxval 255 supported");
  in.get();  // single whitespace byte before the raster
  return header;
}

}  // namespace

ByteImage read_pgm(const fs::path& file) {
  auto in = open_input(file, std::ios::in | std::ios::binary);
  const PnmHeader header = read_pnm_header(in, "P5", file);
  ByteImage img(header.height, header.width);
  in.read(reinterpret_cast<char*>(img.data()),
          static_cast<std::streamsize>(header.width * header.height));
  if (in.gcount() != header.width * header.height) fail(file.string() + ": truncated raster");
  return img;
}

void write_pgm(const ByteImage& img, const fs::path& file) {
  auto out = open_output(file, std::ios::out | std::ios::binary);
  out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) fail("write failed: " + file.string());
}

RgbBytes read_ppm(const fs::path& file) {
  auto in = open_input(file, std::ios::in | std::ios::binary);
  const PnmHeader header = read_pnm_header(in, "P6", file);
  const std::streamsize n = header.width * header.height;
  std::vector<std::uint8_t> interleaved(static_cast<std::size_t>(n * 3));
  in.read(reinterpret_cast<char*>(interleaved.data()), n * 3);
  if (in.gcount() != n * 3) fail(file.string() + ": truncated raster");
  RgbBytes out;
  out.r.resize(header.height, header.width);
  out.g.resize(header.height, header.width);
  out.b.resize(header.height, header.width);
  for (std::streamsize i = 0; i < n; ++i) {
    out.r.data()[i] = interleaved[static_cast<std::size_t>(3 * i)];
    out.g.data()[i] = interleaved[static_cast<std::size_t>(3 * i + 1)];
    out.b.data()[i] = interleaved[static_cast<std::size_t>(3 * i + 2)];
  }
  return out;
}

RgbImage rgb_bytes_to_unit(const RgbBytes& bytes) {
  RgbImage img;
  img.r = bytes.r.cast<double>() / 255.0;
  img.g = bytes.g.cast<double>() / 255.0;
  img.b = bytes.b.cast<double>() / 255.0;
  return img;
}

// ---------------------------------------------------------------------------
// Temps sidecar
// ---------------------------------------------------------------------------

void write_temps(const MatrixX<double>& temps, const fs::path& file) {
  auto out = open_output(file, std::ios::out | std::ios::binary);
  const auto w = static_cast<std::uint32_t>(temps.cols());
  const auto h = static_cast<std::uint32_t>(temps.rows());
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  const MatrixX<float> as_float = temps.cast<float>();
  out.write(reinterpret_cast<const char*>(as_float.data()),
            static_cast<std::streamsize>(as_float.size() * 4));
  if (!out) fail("write failed: " + file.string());
}

MatrixX<double> read_temps(const fs::path& file) {
  auto in = open_input(file, std::ios::in | std::ios::binary);
  std::uint32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || w == 0 || h == 0) fail(file.string() + ": bad sidecar header");
  MatrixX<float> as_float(h, w);
  in.read(reinterpret_cast<char*>(as_float.data()),
          static_cast<std::streamsize>(as_float.size() * 4));
  if (in.gcount() != static_cast<std::streamsize>(as_float.size() * 4))
    fail(file.string() + ": sidecar length does not match header dimensions");
  return as_float.cast<double>();
}

std::int64_t frame_id_from_name(const std::string& name) {
  const std::string stem = fs::path(name).stem().string();
  std::size_t end = stem.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(stem[end - 1]))) --end;
  if (end == stem.size()) return 0;
  return std::stoll(stem.substr(end));
}

ThermalFrame load_thermal_frame(const fs::path& image_path, const LoadOptions& opts) {
  ThermalFrame frame;
  frame.frame_id = frame_id_from_name(image_path.filename().string());

  fs::path sidecar = image_path;
  sidecar.replace_extension(".temps");
  if (fs::exists(sidecar)) {
    frame.temps = read_temps(sidecar);
    if (image_path != sidecar && fs::exists(image_path)) {
      const ByteImage raster = read_pgm(image_path);
      if (raster.rows() != frame.temps.rows() || raster.cols() != frame.temps.cols())
        fail(image_path.string() + ": raster and sidecar dimensions disagree");
    }
  } else if (fs::exists(image_path)) {
    const ByteImage raster = read_pgm(image_path);
    frame.temps = opts.fallback_lo +
                  (raster.cast<double>().array() / 255.0 *
                   (opts.fallback_hi - opts.fallback_lo))
                      .matrix()
                      .array();
  } else {
    fail(image_path.string() + ": no raster and no .temps sidecar");
  }
  frame.validate();
  return frame;
}

// ---------------------------------------------------------------------------
// Synthetic scenes
// ---------------------------------------------------------------------------

namespace {

double bump_value(const SyntheticFace& face, double ambient, double x, double y) {
  const double dx = (x - face.center_x) / face.radius_x;
  const double dy = (y - face.center_y) / face.radius_y;
  return (face.peak_temp - ambient) * std::exp(-0.5 * (dx * dx + dy * dy));
}

}  // namespace

BoundingBox synthetic_face_box(const SyntheticFace& face, double ambient,
                               Eigen::Index width, Eigen::Index height) {
  require(face.radius_x > 0 && face.radius_y > 0, "face radii must be positive");
  require(std::isfinite(face.peak_temp) && face.peak_temp > ambient,
          "face peak must be finite and above ambient");
  const double half = 0.5 * (face.peak_temp - ambient);
  // Half-max contour is an ellipse with semi-axes r*sqrt(2 ln 2); scan a
  // window around it for pixels at or above half-max.
  const double span_x = face.radius_x * 2.0;
  const double span_y = face.radius_y * 2.0;
  const auto x0 = static_cast<Eigen::Index>(std::floor(face.center_x - span_x));
  const auto x1 = static_cast<Eigen::Index>(std::ceil(face.center_x + span_x));
  const auto y0 = static_cast<Eigen::Index>(std::floor(face.center_y - span_y));
  const auto y1 = static_cast<Eigen::Index>(std::ceil(face.center_y + span_y));
  Eigen::Index min_x = x1, max_x = x0, min_y = y1, max_y = y0;
  for (Eigen::Index y = std::max<Eigen::Index>(y0, 0); y <= std::min(y1, height - 1); ++y)
    for (Eigen::Index x = std::max<Eigen::Index>(x0, 0); x <= std::min(x1, width - 1); ++x)
      if (bump_value(face, ambient, static_cast<double>(x), static_cast<double>(y)) >= half) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
  require(min_x <= max_x && min_y <= max_y, "face has no above-half-max pixels in frame");
  return BoundingBox{static_cast<double>(min_x), static_cast<double>(min_y),
                     static_cast<double>(max_x + 1), static_cast<double>(max_y + 1)};
}

SyntheticScene generate_synthetic_frame(const SyntheticSceneConfig& cfg) {
  require(cfg.width > 0 && cfg.height > 0, "scene dimensions must be positive");
  require(cfg.noise_sigma >= 0, "noise sigma must be non-negative");

  std::vector<BoundingBox> boxes;
  boxes.reserve(cfg.faces.size());
  for (const SyntheticFace& face : cfg.faces)
    boxes.push_back(synthetic_face_box(face, cfg.ambient_temp, cfg.width, cfg.height));
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      require(iou(boxes[i], boxes[j]) == 0.0,
              "overlapping synthetic faces are rejected");

  SyntheticScene scene;
  scene.frame.temps =
      MatrixX<double>::Constant(cfg.height, cfg.width, cfg.ambient_temp);
  auto& temps = scene.frame.temps;

  for (const SyntheticFace& face : cfg.faces)
    for (Eigen::Index y = 0; y < cfg.height; ++y)
      for (Eigen::Index x = 0; x < cfg.width; ++x)
        temps(y, x) += bump_value(face, cfg.ambient_temp, static_cast<double>(x),
                                  static_cast<double>(y));

  for (std::size_t fi = 0; fi < cfg.faces.size(); ++fi) {
    const SyntheticFace& face = cfg.faces[fi];
    if (!face.masked) continue;
    const BoundingBox& box = boxes[fi];
    const auto rows = static_cast<Eigen::Index>(box.y_max - box.y_min);
    const auto lower_rows =
        static_cast<Eigen::Index>(std::floor(rows * cfg.lower_face_fraction));
    const auto row0 = static_cast<Eigen::Index>(box.y_max) - lower_rows;
    for (Eigen::Index y = row0; y < static_cast<Eigen::Index>(box.y_max); ++y)
      for (Eigen::Index x = static_cast<Eigen::Index>(box.x_min);
           x < static_cast<Eigen::Index>(box.x_max); ++x)
        temps(y, x) += face.mask_offset;
  }

  if (cfg.noise_sigma > 0) {
    Rng rng(cfg.seed);
    for (Eigen::Index y = 0; y < cfg.height; ++y)
      for (Eigen::Index x = 0; x < cfg.width; ++x)
        temps(y, x) += rng.gaussian(0.0, cfg.noise_sigma);
  }
  scene.frame.validate();

  for (std::size_t fi = 0; fi < cfg.faces.size(); ++fi) {
    Annotation ann;
    ann.bbox = boxes[fi];
    ann.mask = cfg.faces[fi].masked;
    scene.annotations.push_back(std::move(ann));
  }
  return scene;
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "mixed") return Scenario::kMixed;
  if (name == "all-febrile") return Scenario::kAllFebrile;
  if (name == "all-afebrile") return Scenario::kAllAfebrile;
  if (name == "all-masked") return Scenario::kAllMasked;
  if (name == "all-unmasked") return Scenario::kAllUnmasked;
  fail("unknown scenario '" + name + "'");
}

namespace {

std::string frame_name(std::int64_t index) {
  std::ostringstream name;
  name << "frame_" << std::setw(6) << std::setfill('0') << index << ".pgm";
  return name.str();
}

bool draw_febrile(Scenario scenario, Rng& rng) {
  switch (scenario) {
    case Scenario::kAllFebrile: return true;
    case Scenario::kAllAfebrile: return false;
    default: return rng.next_double() < 0.3;
  }
}

bool draw_masked(Scenario scenario, Rng& rng) {
  switch (scenario) {
    case Scenario::kAllMasked: return true;
    case Scenario::kAllUnmasked: return false;
    default: return rng.next_double() < 0.5;
  }
}

}  // namespace

GeneratedDataset generate_synthetic_dataset(const DatasetGenConfig& cfg) {
  require(cfg.n > 0, "dataset size must be positive");
  fs::create_directories(cfg.out_dir);

  // lux labels cycle the four evaluation buckets
  const double lux_cycle[] = {10, 50, 100, 200};
  constexpr std::int64_t kBaseTimestampMs = 1700000000000;
  constexpr std::int64_t kFramePeriodMs = 111;  // ~9 Hz
  constexpr double kMinBoxSeparation = 12;      // pixels between face boxes

  Rng placement(cfg.seed);
  GeneratedDataset dataset;
  std::vector<GroundTruthRecord> gt_records;
  std::vector<ManifestEntry> manifest;
  std::ostringstream faces_out;
  faces_out << std::setprecision(17);

  for (std::int64_t i = 0; i < cfg.n; ++i) {
    SyntheticSceneConfig scene_cfg;
    scene_cfg.width = cfg.width;
    scene_cfg.height = cfg.height;
    scene_cfg.ambient_temp = cfg.ambient_temp;
    scene_cfg.noise_sigma = cfg.noise_sigma;
    scene_cfg.seed = cfg.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1));

    const std::int64_t face_count = placement.uniform_int(1, 5);
    std::vector<BoundingBox> placed;
    for (std::int64_t f = 0; f < face_count; ++f) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        SyntheticFace face;
        face.radius_x = placement.uniform(7.0, 12.0);
        face.radius_y = face.radius_x * placement.uniform(1.0, 1.4);
        const auto margin_x = static_cast<std::int64_t>(std::ceil(face.radius_x * 1.3)) + 2;
        const auto margin_y = static_cast<std::int64_t>(std::ceil(face.radius_y * 1.3)) + 2;
        face.center_x = static_cast<double>(
            placement.uniform_int(margin_x, cfg.width - 1 - margin_x));
        face.center_y = static_cast<double>(
            placement.uniform_int(margin_y, cfg.height - 1 - margin_y));
        // Peaks sit at least 0.5 degC away from the 37.5 degC fever threshold.
        // The afebrile floor of 36.7 degC keeps a masked face's central pixels
        // (offset by -6 degC) inside the detector's 30-40 degC body band, so
        // the warm region the baseline detector sees still reaches below the
        // mask line and overlaps the annotation box at IOU >= 0.5.
        face.peak_temp = draw_febrile(cfg.scenario, placement)
                             ? placement.uniform(38.0, 39.5)
                             : placement.uniform(36.7, 37.0);
        face.masked = draw_masked(cfg.scenario, placement);
        const BoundingBox box =
            synthetic_face_box(face, cfg.ambient_temp, cfg.width, cfg.height);
        BoundingBox padded = box;
        padded.x_min = std::max(0.0, padded.x_min - kMinBoxSeparation);
        padded.y_min = std::max(0.0, padded.y_min - kMinBoxSeparation);
        padded.x_max += kMinBoxSeparation;
        padded.y_max += kMinBoxSeparation;
        const bool clear = std::none_of(placed.begin(), placed.end(),
                                        [&](const BoundingBox& other) {
                                          return iou(padded, other) > 0.0;
                                        });
        if (!clear) continue;
        placed.push_back(box);
        scene_cfg.faces.push_back(face);
        break;
      }
    }

    const SyntheticScene scene = generate_synthetic_frame(scene_cfg);
    const std::string name = frame_name(i);
    dataset.image_names.push_back(name);

    fs::path image_path = cfg.out_dir / name;
    write_pgm(to_byte_image(normalize_frame(scene.frame)), image_path);
    fs::path sidecar = image_path;
    sidecar.replace_extension(".temps");
    write_temps(scene.frame.temps, sidecar);

    for (std::size_t fi = 0; fi < scene.annotations.size(); ++fi) {
      const Annotation& ann = scene.annotations[fi];
      GroundTruthRecord rec;
      rec.image_name = name;
      rec.x_min = static_cast<std::int64_t>(ann.bbox.x_min);
      rec.y_min = static_cast<std::int64_t>(ann.bbox.y_min);
      rec.x_max = static_cast<std::int64_t>(ann.bbox.x_max);
      rec.y_max = static_cast<std::int64_t>(ann.bbox.y_max);
      rec.mask = ann.mask;
      gt_records.push_back(rec);

      const SyntheticFace& face = scene_cfg.faces[fi];
      dataset.faces.push_back(
          SyntheticFaceTruth{name, ann.bbox, face.peak_temp, face.masked});
      faces_out << name << ' ' << rec.x_min << ' ' << rec.y_min << ' ' << rec.x_max
                << ' ' << rec.y_max << ' ' << face.peak_temp << ' '
                << (face.masked ? 1 : 0) << '\n';
    }

    manifest.push_back(ManifestEntry{name, lux_cycle[i % 4],
                                     kBaseTimestampMs + i * kFramePeriodMs});
  }

  write_ground_truth(gt_records, cfg.out_dir / "ground_truth.txt");
  {
    auto out = open_output(cfg.out_dir / "manifest.txt");
    write_manifest(manifest, out);
  }
  {
    auto out = open_output(cfg.out_dir / "faces.txt");
    out << faces_out.str();
  }
  return dataset;
}

std::vector<SyntheticFaceTruth> parse_face_truths(const fs::path& file) {
  auto in = open_input(file);
  std::vector<SyntheticFaceTruth> truths;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream fields(line);
    SyntheticFaceTruth t;
    int mask_flag = 0;
    if (!(fields >> t.image_name >> t.bbox.x_min >> t.bbox.y_min >> t.bbox.x_max >>
          t.bbox.y_max >> t.peak_temp >> mask_flag))
      fail_line(line_no, "expected 'image x0 y0 x1 y1 peak masked'");
    t.masked = mask_flag == 1;
    truths.push_back(std::move(t));
  }
  return truths;
}

}  // namespace thermoscreen
