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

#ifndef NERDISTILL_TAGGER_BATCH_H_
#define NERDISTILL_TAGGER_BATCH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nerdistill/corpus/utterance.h"
#include "nerdistill/corpus/vocabulary.h"

namespace nerdistill::tagger {

// N padded rows of max_len token ids plus per-position class targets.
// Positions at or beyond lengths[n] are padding: token id PAD, target
// kIgnore. They never reach the loss or attention.
struct TrainingBatch {
  static constexpr std::int32_t kIgnore = -1;

  int max_len = 0;
  std::vector<std::int32_t> token_ids;  // N * max_len
  std::vector<std::int32_t> targets;    // N * max_len
  std::vector<int> lengths;             // N, each in [1, max_len]
  // Utterances that were longer than max_len and got cut.
  std::size_t truncated = 0;

  int size() const { return static_cast<int>(lengths.size()); }
  std::size_t effective_tokens() const;
  std::int32_t token(int n, int t) const { return token_ids[n * max_len + t]; }
  std::int32_t target(int n, int t) const { return targets[n * max_len + t]; }
};

// Untagged utterances get all-kIgnore targets.
TrainingBatch make_batch(const corpus::Vocabulary& vocab,
                         std::span<const corpus::LabeledUtterance> utterances,
                         int max_len);

// Batch from pre-encoded rows (ids and class indices of equal length).
TrainingBatch make_batch(std::span<const std::vector<std::int32_t>> ids,
                         std::span<const std::vector<std::int32_t>> targets,
                         int max_len);

}  // namespace nerdistill::tagger

#endif  // NERDISTILL_TAGGER_BATCH_H_
