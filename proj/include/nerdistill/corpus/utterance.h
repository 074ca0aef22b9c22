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

#ifndef NERDISTILL_CORPUS_UTTERANCE_H_
#define NERDISTILL_CORPUS_UTTERANCE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nerdistill/corpus/tags.h"

namespace nerdistill::corpus {

// A whitespace-tokenized utterance, optionally with one BIO tag per token.
struct LabeledUtterance {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::vector<Tag>> tags;

  bool labeled() const { return tags.has_value(); }
  // Decoded entity spans; empty for unlabeled utterances.
  std::vector<EntitySpan> spans() const;
  // Tokens joined by single spaces.
  std::string text() const;

  bool operator==(const LabeledUtterance&) const = default;
};

struct DatasetSplit {
  std::vector<LabeledUtterance> train;
  std::vector<LabeledUtterance> dev;
  std::vector<LabeledUtterance> test;

  std::size_t size() const { return train.size() + dev.size() + test.size(); }
};

// Throws ValidationError when the utterance breaks an invariant: empty token
// list, empty or whitespace-containing token, |tags| != |tokens|, or (when
// require_bio_valid) an I-X that does not continue an X span.
void validate_utterance(const LabeledUtterance& utterance,
                        bool require_bio_valid = true);

// Checks ids are unique across all three splits and that no token sequence
// appears in more than one split.
void validate_split(const DatasetSplit& split);

// Throws ValidationError naming the first id shared by both collections.
void require_disjoint_ids(std::span<const LabeledUtterance> a,
                          std::span<const LabeledUtterance> b);

// Copy with tags removed.
std::vector<LabeledUtterance> strip_tags(
    std::span<const LabeledUtterance> utterances);

}  // namespace nerdistill::corpus

#endif  // NERDISTILL_CORPUS_UTTERANCE_H_
