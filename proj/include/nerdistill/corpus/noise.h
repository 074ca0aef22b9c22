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

#ifndef NERDISTILL_CORPUS_NOISE_H_
#define NERDISTILL_CORPUS_NOISE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nerdistill/corpus/utterance.h"

namespace nerdistill::corpus {

// Simulated ASR transcript noise. Entity tokens are only ever re-cased;
// punctuation removal, filler insertion and repetition touch O tokens only.
struct NoiseConfig {
  bool strip_punctuation = true;
  // Per-token probability of lowercasing (partial casing).
  double lowercase_probability = 0.0;
  // Probability of inserting a filler after each token.
  double dysfluency_rate = 0.0;
  // Entries may contain spaces ("you know"); they are split into tokens.
  std::vector<std::string> filler_lexicon = {"uh", "um", "you know", "like",
                                             "i mean"};
  // Probability of duplicating an O token (false start).
  double repeat_rate = 0.0;
  std::uint64_t rng_seed = 0;

  // Throws ConfigError when a rate is outside [0, 1] or the lexicon is
  // unusable while dysfluency_rate > 0.
  void validate() const;
};

// A token made only of ASCII punctuation characters.
bool is_punctuation_token(std::string_view token);

// Requires gold tags. Deterministic in (utterance, config). When stripping
// would leave no tokens at all, punctuation is kept.
LabeledUtterance noisify(const LabeledUtterance& utterance,
                         const NoiseConfig& config);

}  // namespace nerdistill::corpus

#endif  // NERDISTILL_CORPUS_NOISE_H_
