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

#ifndef TTFS_CHECKPOINT_H_
#define TTFS_CHECKPOINT_H_

#include <optional>
#include <string>

#include "ttfs/ann.hpp"
#include "ttfs/grad.hpp"
#include "ttfs/network.hpp"

namespace ttfs {

// Optional training state stored next to the parameters.
struct CheckpointExtras {
  std::optional<AdamState> adam;
  std::string rng_state;  // serialized engine state
  long iteration = 0;
};

// Little-endian binary checkpoint: magic, format version, network kind,
// raw 64-bit parameter payload, CRC32 checksum. Reload reproduces forward
// outputs bit-identically; save -> load -> save is byte-identical.
void save_checkpoint(const Network& net, const std::string& path,
                     const CheckpointExtras* extras = nullptr);
Network load_checkpoint(const std::string& path,
                        CheckpointExtras* extras = nullptr);

// Same container holding plain ReLU weights, for importing pretrained
// networks into the converter.
void save_ann_checkpoint(const AnnNetwork& ann, const std::string& path);
AnnNetwork load_ann_checkpoint(const std::string& path);

enum class CheckpointKind : std::uint8_t { kSnn = 0, kAnn = 1 };

// Inspects the header only (no checksum verification).
CheckpointKind peek_checkpoint_kind(const std::string& path);

}  // namespace ttfs

#endif  // TTFS_CHECKPOINT_H_
