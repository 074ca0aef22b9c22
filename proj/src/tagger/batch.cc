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

#include "nerdistill/tagger/batch.h"

#include <algorithm>

#include "nerdistill/error.h"

namespace nerdistill::tagger {

std::size_t TrainingBatch::effective_tokens() const {
  std::size_t n = 0;
  for (int len : lengths) n += static_cast<std::size_t>(len);
  return n;
}

TrainingBatch make_batch(std::span<const std::vector<std::int32_t>> ids,
                         std::span<const std::vector<std::int32_t>> targets,
                         int max_len) {
  if (ids.size() != targets.size()) {
    throw ValidationError("make_batch: ids/targets row count mismatch");
  }
  if (max_len <= 0) throw ValidationError("make_batch: max_len must be > 0");
  TrainingBatch batch;
  batch.max_len = max_len;
  const std::size_t n = ids.size();
  batch.token_ids.assign(n * max_len, corpus::Vocabulary::kPad);
  batch.targets.assign(n * max_len, TrainingBatch::kIgnore);
  batch.lengths.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ids[i].empty()) throw ValidationError("make_batch: empty sequence");
    if (!targets[i].empty() && targets[i].size() != ids[i].size()) {
      throw ValidationError("make_batch: ids/targets length mismatch");
    }
    const int len = static_cast<int>(
        std::min<std::size_t>(ids[i].size(), static_cast<std::size_t>(max_len)));
    if (ids[i].size() > static_cast<std::size_t>(max_len)) ++batch.truncated;
    batch.lengths[i] = len;
    std::copy_n(ids[i].begin(), len, batch.token_ids.begin() + i * max_len);
    if (!targets[i].empty()) {
      std::copy_n(targets[i].begin(), len, batch.targets.begin() + i * max_len);
    }
  }
  return batch;
}

TrainingBatch make_batch(const corpus::Vocabulary& vocab,
                         std::span<const corpus::LabeledUtterance> utterances,
                         int max_len) {
  std::vector<std::vector<std::int32_t>> ids;
  std::vector<std::vector<std::int32_t>> targets;
  ids.reserve(utterances.size());
  targets.reserve(utterances.size());
  for (const corpus::LabeledUtterance& u : utterances) {
    ids.push_back(vocab.encode(u.tokens));
    std::vector<std::int32_t> t;
    if (u.tags) {
      if (u.tags->size() != u.tokens.size()) {
        throw ValidationError("make_batch: tag/token mismatch in '" + u.id + "'");
      }
      for (corpus::Tag tag : *u.tags) t.push_back(tag.index());
    } else {
      t.assign(u.tokens.size(), TrainingBatch::kIgnore);
    }
    targets.push_back(std::move(t));
  }
  return make_batch(ids, targets, max_len);
}

}  // namespace nerdistill::tagger
