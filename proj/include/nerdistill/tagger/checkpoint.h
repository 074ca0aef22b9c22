// Copyright 2026 The nerdistill Authors.
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

#ifndef NERDISTILL_TAGGER_CHECKPOINT_H_
#define NERDISTILL_TAGGER_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "nerdistill/tagger/model.h"

namespace nerdistill::tagger {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout, all integers little-endian:
//   "NERDCKPT"                         8 bytes magic
//   u32 version
//   u32 n, n bytes                     JSON header {"config": ..., "provenance": ...}
//   u32 count, count x (u32 n, bytes)  vocabulary in id order
//   u32 tensors, per tensor:
//     u32 n, name bytes, u32 rows, u32 cols, rows*cols f32
//   u64 FNV-1a of every preceding byte
// load() verifies magic, version, checksum, and that every tensor matches
// the layout the config implies; any mismatch raises FormatError.
struct Checkpoint {
  TaggerModel model;
  nlohmann::ordered_json provenance;
};

void save(const TaggerModel& model, const std::filesystem::path& path,
          const nlohmann::ordered_json& provenance = nlohmann::ordered_json::object());
Checkpoint load_checkpoint(const std::filesystem::path& path);
TaggerModel load(const std::filesystem::path& path);

// In-memory form of the same format.
std::string serialize(const TaggerModel& model,
                      const nlohmann::ordered_json& provenance =
                          nlohmann::ordered_json::object());
Checkpoint deserialize(const std::string& bytes);

// Hex fingerprint of the parameters, config and vocabulary.
std::string model_id(const TaggerModel& model);

}  // namespace nerdistill::tagger

#endif  // NERDISTILL_TAGGER_CHECKPOINT_H_
