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

#include "nerdistill/corpus/vocabulary.h"

#include <algorithm>
#include <map>

#include "nerdistill/error.h"

namespace nerdistill::corpus {

Vocabulary::Vocabulary() : tokens_{kPadToken, kUnkToken} {}

Vocabulary Vocabulary::build(std::span<const LabeledUtterance> data,
                             std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const LabeledUtterance& u : data) {
    for (const std::string& t : u.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [token, n] : counts) {
    if (n >= min_count && token != kPadToken && token != kUnkToken) {
      ranked.emplace_back(token, n);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens = {kPadToken, kUnkToken};
  for (auto& [token, n] : ranked) tokens.push_back(token);
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw ValidationError("vocabulary must start with <pad>, <unk>");
  }
  Vocabulary vocab;
  vocab.tokens_ = std::move(tokens);
  for (std::size_t i = 2; i < vocab.tokens_.size(); ++i) {
    if (!vocab.index_.emplace(vocab.tokens_[i], static_cast<std::int32_t>(i))
             .second) {
      throw ValidationError("duplicate vocabulary token '" +
                            vocab.tokens_[i] + "'");
    }
  }
  return vocab;
}

std::int32_t Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::int32_t> Vocabulary::encode(
    std::span<const std::string> tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(id(t));
  return ids;
}

}  // namespace nerdistill::corpus
