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

#ifndef NERDISTILL_CORPUS_STATS_H_
#define NERDISTILL_CORPUS_STATS_H_

#include <array>
#include <cstddef>
#include <span>

#include "nerdistill/corpus/utterance.h"

namespace nerdistill::corpus {

// Utterance-level class distribution. per_type counts utterances that
// contain at least one span of the type, not mentions.
struct CorpusStats {
  std::size_t total = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::array<std::size_t, kNumEntityTypes> per_type{};

  std::size_t count(EntityType type) const {
    return per_type[static_cast<std::size_t>(type)];
  }
  double positive_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(positive) / total;
  }
  bool operator==(const CorpusStats&) const = default;
};

// Throws ValidationError if any utterance is untagged.
CorpusStats corpus_stats(std::span<const LabeledUtterance> data);

}  // namespace nerdistill::corpus

#endif  // NERDISTILL_CORPUS_STATS_H_
