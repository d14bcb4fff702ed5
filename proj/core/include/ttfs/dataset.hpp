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

#ifndef TTFS_DATASET_H_
#define TTFS_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ttfs/matrix.hpp"

namespace ttfs {

struct Dataset {
  std::vector<Vector> images;  // features normalized into [0, 1]
  std::vector<int> labels;
  int num_classes = 0;
  std::string split;

  std::size_t size() const { return images.size(); }
  std::size_t feature_count() const {
    return images.empty() ? 0 : images.front().size();
  }

  // First `count` samples (all if count == 0 or beyond the end).
  Dataset head(std::size_t count) const;
};

// Reads an IDX image/label file pair: big-endian magic (0x00000803 for
// images, 0x00000801 for labels), dimension sizes, then raw bytes. Pixels
// are divided by 255 and flattened. Throws FormatError on a bad magic,
// a truncated file or an image/label count mismatch.
Dataset load_idx_dataset(const std::string& images_path,
                         const std::string& labels_path);

// Writes a dataset back out as an IDX pair (bytes are round(v * 255)); used
// by tests and for exporting synthetic data.
void save_idx_dataset(const Dataset& data, const std::string& images_path,
                      const std::string& labels_path, std::size_t dim_rows,
                      std::size_t dim_cols);

// Deterministic synthetic classification data: per class a random prototype
// in [0, 1]^features, samples are noisy copies clipped back into range.
Dataset make_synthetic(std::size_t samples, std::size_t features,
                       int num_classes, std::uint64_t seed,
                       double noise = 0.08);

}  // namespace ttfs

#endif  // TTFS_DATASET_H_
