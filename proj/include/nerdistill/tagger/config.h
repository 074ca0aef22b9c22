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

#ifndef NERDISTILL_TAGGER_CONFIG_H_
#define NERDISTILL_TAGGER_CONFIG_H_

#include <cstdint>

#include "json.hpp"

namespace nerdistill::tagger {

// Architecture hyperparameters of one encoder token classifier.
struct TaggerConfig {
  int vocab_size = 0;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 2;
  int d_ff = 256;
  int max_len = 64;
  int n_classes = 7;
  double dropout_rate = 0.1;
  std::uint64_t seed = 1;

  // Throws ConfigError. Checks positivity, d_model % n_heads == 0,
  // n_classes == Tag::kNumClasses and dropout in [0, 1).
  void validate() const;

  // Desk-scale stand-ins for the large teacher and the small student:
  // 4 x 128 (4 heads, ff 512) and 2 x 48 (2 heads, ff 192).
  static TaggerConfig teacher_preset(int vocab_size, int max_len = 64);
  static TaggerConfig student_preset(int vocab_size, int max_len = 64);

  bool operator==(const TaggerConfig&) const = default;
};

// Models here start from random init rather than a pretrained encoder, and
// 5e-5 barely moves them in a few epochs. Bundled configs use this instead.
inline constexpr double kDeskLearningRate = 1e-3;

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 5e-5;
  int epochs = 5;
  // Adam.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;

  // Batch 2, lr 5e-5, 3 epochs.
  static TrainConfig teacher_defaults();
  // Batch 32, lr 5e-5, 5 epochs.
  static TrainConfig student_defaults();

  bool operator==(const TrainConfig&) const = default;
};

void to_json(nlohmann::ordered_json& j, const TaggerConfig& c);
void from_json(const nlohmann::ordered_json& j, TaggerConfig& c);
void to_json(nlohmann::ordered_json& j, const TrainConfig& c);
void from_json(const nlohmann::ordered_json& j, TrainConfig& c);

}  // namespace nerdistill::tagger

#endif  // NERDISTILL_TAGGER_CONFIG_H_
