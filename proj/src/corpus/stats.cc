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

#include "nerdistill/corpus/stats.h"

#include "nerdistill/error.h"

namespace nerdistill::corpus {

CorpusStats corpus_stats(std::span<const LabeledUtterance> data) {
  CorpusStats stats;
  for (const LabeledUtterance& u : data) {
    if (!u.tags) {
      throw ValidationError("corpus_stats: utterance '" + u.id +
                            "' has no tags");
    }
    std::array<bool, kNumEntityTypes> present{};
    for (const EntitySpan& span : bio_decode(*u.tags)) {
      present[static_cast<std::size_t>(span.type)] = true;
    }
    ++stats.total;
    bool any = false;
    for (std::size_t t = 0; t < kNumEntityTypes; ++t) {
      if (present[t]) {
        ++stats.per_type[t];
        any = true;
      }
    }
    ++(any ? stats.positive : stats.negative);
  }
  return stats;
}

}  // namespace nerdistill::corpus
