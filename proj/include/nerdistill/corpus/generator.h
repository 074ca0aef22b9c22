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

#ifndef NERDISTILL_CORPUS_GENERATOR_H_
#define NERDISTILL_CORPUS_GENERATOR_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nerdistill/corpus/noise.h"
#include "nerdistill/corpus/utterance.h"

namespace nerdistill::corpus {

// Entries are surface strings, possibly multi-word ("New York").
using Gazetteers = std::map<EntityType, std::vector<std::string>>;

// Split proportions of the labeled in-domain data: 16124 / 2292 / 4497.
inline constexpr std::size_t kTrainShare = 16124;
inline constexpr std::size_t kDevShare = 2292;
inline constexpr std::size_t kTestShare = 4497;

struct SplitSizes {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
};

// train and dev are rounded shares of count; test takes the remainder.
SplitSizes split_sizes(std::size_t count);

struct GeneratorOptions {
  // Probability that an utterance is drawn from a template with at least one
  // entity slot.
  double entity_fraction = 0.6;
};

// Template-based business-call utterances. A template is a whitespace
// separated token list where {PERSON}, {PRODORG} and {LOCATION} are entity
// slots and {DAY}, {TIME}, {NUMBER}, {ITEM} are filled from small built-in
// non-entity lexicons. Primary entity types are assigned round-robin so that
// per-type presence stays balanced. Token sequences are unique across the
// returned splits. count < 10, an empty template list, or an entity slot
// whose gazetteer is empty raise ConfigError.
DatasetSplit generate_corpus(const Gazetteers& gazetteers,
                             std::span<const std::string> templates,
                             std::size_t count, const NoiseConfig& noise,
                             std::uint64_t seed,
                             const GeneratorOptions& options = {});

// An unlabeled-pool stand-in drawn from the same generator. Tags are the
// hidden gold labels; callers strip them before treating the pool as
// unlabeled. No returned token sequence occurs in `exclude`.
std::vector<LabeledUtterance> generate_pool(
    const Gazetteers& gazetteers, std::span<const std::string> templates,
    std::size_t count, const NoiseConfig& noise, std::uint64_t seed,
    double entity_fraction, const DatasetSplit& exclude);

}  // namespace nerdistill::corpus

#endif  // NERDISTILL_CORPUS_GENERATOR_H_
