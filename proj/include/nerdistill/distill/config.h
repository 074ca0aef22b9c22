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

#ifndef NERDISTILL_DISTILL_CONFIG_H_
#define NERDISTILL_DISTILL_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "json.hpp"
#include "nerdistill/corpus/noise.h"
#include "nerdistill/distill/filter.h"
#include "nerdistill/tagger/config.h"

namespace nerdistill::distill {

struct CorpusSettings {
  std::size_t count = 1000;
  double entity_fraction = 0.6;
  corpus::NoiseConfig noise;
  std::uint64_t seed = 0;
};

struct PoolSettings {
  // Accepted (pseudo-labeled) pool size as a multiple of gold train size.
  double ratio = 30.0;
  // Share of entity-bearing utterances in the raw, unfiltered pool.
  double entity_fraction = 0.5;
  corpus::NoiseConfig noise;
  std::uint64_t seed = 0;
  int workers = 1;  // pseudo-labeling threads
};

struct BenchSettings {
  bool enabled = true;
  int warmup = 10;
  int iterations = 100;
};

// Everything run_pipeline needs besides the gazetteer and template data.
// Model configs carry vocab_size 0 here; it is fixed once each model's
// vocabulary has been built from its own training text.
struct PipelineConfig {
  std::uint64_t seed = 1;
  CorpusSettings corpus;
  PoolSettings pool;
  FilterConfig filter;
  int vocab_min_count = 1;
  tagger::TaggerConfig teacher = tagger::TaggerConfig::teacher_preset(0);
  tagger::TrainConfig teacher_train = tagger::TrainConfig::teacher_defaults();
  tagger::TaggerConfig student = tagger::TaggerConfig::student_preset(0);
  tagger::TrainConfig stage1 = tagger::TrainConfig::student_defaults();
  tagger::TrainConfig stage2 = tagger::TrainConfig::student_defaults();
  BenchSettings bench;

  // Range checks on every field (ConfigError naming the key).
  void validate() const;
};

// Seeds not given explicitly derive from the global seed as
// mix_seed(seed, k): corpus 1, corpus noise 2, pool 3, pool noise 4,
// teacher init 5, teacher train 6, student init 7, stage 1 8, stage 2 9.
// Unknown keys and ill-typed values raise ConfigError naming the dotted key
// path. `seed_override` replaces the file's global seed before derivation.
PipelineConfig pipeline_config_from_json(const nlohmann::ordered_json& j,
                                         std::optional<std::uint64_t> seed_override = {});

// Fully resolved form: every key present, every seed explicit. Parsing it
// back yields an equal config.
nlohmann::ordered_json to_json(const PipelineConfig& config);

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

}  // namespace nerdistill::distill

#endif  // NERDISTILL_DISTILL_CONFIG_H_
