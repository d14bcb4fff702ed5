// Copyright 2026 The ttfsnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ttfs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "ttfs/error.hpp"

namespace ttfs {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw FormatError("IDX file truncated: " + path);
  }
  return (static_cast<std::uint32_t>(bytes[0]) << 24) |
         (static_cast<std::uint32_t>(bytes[1]) << 16) |
         (static_cast<std::uint32_t>(bytes[2]) << 8) |
         static_cast<std::uint32_t>(bytes[3]);
}

void write_be32(std::ostream& out, std::uint32_t value) {
  unsigned char bytes[4] = {static_cast<unsigned char>(value >> 24),
                            static_cast<unsigned char>(value >> 16),
                            static_cast<unsigned char>(value >> 8),
                            static_cast<unsigned char>(value)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

Dataset Dataset::head(std::size_t count) const {
  if (count == 0 || count >= size()) return *this;
  Dataset out;
  out.images.assign(images.begin(), images.begin() + count);
  out.labels.assign(labels.begin(), labels.begin() + count);
  out.num_classes = num_classes;
  out.split = split;
  return out;
}

Dataset load_idx_dataset(const std::string& images_path,
                         const std::string& labels_path) {
  std::ifstream images_file(images_path, std::ios::binary);
  if (!images_file) throw FormatError("cannot open " + images_path);
  std::ifstream labels_file(labels_path, std::ios::binary);
  if (!labels_file) throw FormatError("cannot open " + labels_path);

  if (read_be32(images_file, images_path) != kImagesMagic) {
    throw FormatError("bad IDX image magic in " + images_path);
  }
  const std::uint32_t image_count = read_be32(images_file, images_path);
  const std::uint32_t rows = read_be32(images_file, images_path);
  const std::uint32_t cols = read_be32(images_file, images_path);

  if (read_be32(labels_file, labels_path) != kLabelsMagic) {
    throw FormatError("bad IDX label magic in " + labels_path);
  }
  const std::uint32_t label_count = read_be32(labels_file, labels_path);
  if (label_count != image_count) {
    throw FormatError("IDX image/label count mismatch: " +
                      std::to_string(image_count) + " vs " +
                      std::to_string(label_count));
  }

  Dataset data;
  const std::size_t features = static_cast<std::size_t>(rows) * cols;
  data.images.resize(image_count);
  data.labels.resize(label_count);
  std::vector<unsigned char> buffer(features);
  for (std::uint32_t s = 0; s < image_count; ++s) {
    if (!images_file.read(reinterpret_cast<char*>(buffer.data()),
                          static_cast<std::streamsize>(features))) {
      throw FormatError("IDX file truncated: " + images_path);
    }
    Vector& x = data.images[s];
    x.resize(features);
    for (std::size_t j = 0; j < features; ++j) {
      x[j] = static_cast<double>(buffer[j]) / 255.0;
    }
  }
  std::vector<unsigned char> label_bytes(label_count);
  if (!labels_file.read(reinterpret_cast<char*>(label_bytes.data()),
                        static_cast<std::streamsize>(label_count))) {
    throw FormatError("IDX file truncated: " + labels_path);
  }
  int max_label = 0;
  for (std::uint32_t s = 0; s < label_count; ++s) {
    data.labels[s] = static_cast<int>(label_bytes[s]);
    max_label = std::max(max_label, data.labels[s]);
  }
  data.num_classes = max_label + 1;
  return data;
}

void save_idx_dataset(const Dataset& data, const std::string& images_path,
                      const std::string& labels_path, std::size_t dim_rows,
                      std::size_t dim_cols) {
  if (dim_rows * dim_cols != data.feature_count()) {
    throw DimensionError("save_idx_dataset: rows*cols != feature count");
  }
  std::ofstream images_file(images_path, std::ios::binary);
  if (!images_file) throw FormatError("cannot write " + images_path);
  std::ofstream labels_file(labels_path, std::ios::binary);
  if (!labels_file) throw FormatError("cannot write " + labels_path);

  write_be32(images_file, kImagesMagic);
  write_be32(images_file, static_cast<std::uint32_t>(data.size()));
  write_be32(images_file, static_cast<std::uint32_t>(dim_rows));
  write_be32(images_file, static_cast<std::uint32_t>(dim_cols));
  for (const Vector& x : data.images) {
    for (double v : x) {
      const unsigned char byte =
          static_cast<unsigned char>(std::lround(v * 255.0));
      images_file.write(reinterpret_cast<const char*>(&byte), 1);
    }
  }
  write_be32(labels_file, kLabelsMagic);
  write_be32(labels_file, static_cast<std::uint32_t>(data.size()));
  for (int label : data.labels) {
    const unsigned char byte = static_cast<unsigned char>(label);
    labels_file.write(reinterpret_cast<const char*>(&byte), 1);
  }
}

Dataset make_synthetic(std::size_t samples, std::size_t features,
                       int num_classes, std::uint64_t seed, double noise) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<Vector> prototypes(num_classes, Vector(features));
  for (auto& p : prototypes) {
    for (double& v : p) v = uniform(rng);
  }
  Dataset data;
  data.num_classes = num_classes;
  data.images.resize(samples);
  data.labels.resize(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const int label = static_cast<int>(s % num_classes);
    data.labels[s] = label;
    Vector& x = data.images[s];
    x.resize(features);
    for (std::size_t j = 0; j < features; ++j) {
      x[j] = std::clamp(prototypes[label][j] + gauss(rng), 0.0, 1.0);
    }
  }
  return data;
}

}  // namespace ttfs
