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

#ifndef NERDISTILL_CORPUS_VOCABULARY_H_
#define NERDISTILL_CORPUS_VOCABULARY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nerdistill/corpus/utterance.h"

namespace nerdistill::corpus {

// Case-sensitive token vocabulary. Id 0 is padding, id 1 the unknown token;
// regular tokens occupy [2, size()).
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();

  // Tokens seen at least min_count times, ordered by descending frequency
  // and then lexicographically.
  static Vocabulary build(std::span<const LabeledUtterance> data,
                          std::size_t min_count = 1);
  // `tokens` lists the full id order and must start with <pad>, <unk>.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::int32_t id(const std::string& token) const;
  const std::string& token(std::int32_t id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<std::int32_t> encode(std::span<const std::string> tokens) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

}  // namespace nerdistill::corpus

#endif  // NERDISTILL_CORPUS_VOCABULARY_H_
