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

#include "nerdistill/corpus/utterance.h"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "nerdistill/error.h"

namespace nerdistill::corpus {

std::vector<EntitySpan> LabeledUtterance::spans() const {
  if (!tags) return {};
  return bio_decode(*tags);
}

std::string LabeledUtterance::text() const {
  std::string out;
  for (const std::string& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

void validate_utterance(const LabeledUtterance& utterance,
                        bool require_bio_valid) {
  const std::string where = "utterance '" + utterance.id + "': ";
  if (utterance.tokens.empty()) {
    throw ValidationError(where + "no tokens");
  }
  for (const std::string& token : utterance.tokens) {
    if (token.empty()) throw ValidationError(where + "empty token");
    for (unsigned char c : token) {
      if (std::isspace(c)) {
        throw ValidationError(where + "token '" + token +
                              "' contains whitespace");
      }
    }
  }
  if (!utterance.tags) return;
  if (utterance.tags->size() != utterance.tokens.size()) {
    throw ValidationError(where + std::to_string(utterance.tags->size()) +
                          " tags for " +
                          std::to_string(utterance.tokens.size()) + " tokens");
  }
  if (require_bio_valid && !is_bio_valid(*utterance.tags)) {
    throw ValidationError(where + "tag sequence is not BIO-valid");
  }
}

void validate_split(const DatasetSplit& split) {
  std::unordered_set<std::string> ids;
  std::unordered_map<std::string, int> owner;
  const std::vector<LabeledUtterance>* parts[] = {&split.train, &split.dev,
                                                  &split.test};
  for (int p = 0; p < 3; ++p) {
    for (const LabeledUtterance& u : *parts[p]) {
      validate_utterance(u);
      if (!ids.insert(u.id).second) {
        throw ValidationError("duplicate utterance id '" + u.id + "'");
      }
      auto [it, inserted] = owner.emplace(u.text(), p);
      if (!inserted && it->second != p) {
        throw ValidationError("utterance '" + u.id +
                              "' duplicates a token sequence from another "
                              "split");
      }
    }
  }
}

void require_disjoint_ids(std::span<const LabeledUtterance> a,
                          std::span<const LabeledUtterance> b) {
  std::unordered_set<std::string> ids;
  for (const LabeledUtterance& u : a) ids.insert(u.id);
  for (const LabeledUtterance& u : b) {
    if (ids.contains(u.id)) {
      throw ValidationError("utterance id '" + u.id +
                            "' appears in both collections");
    }
  }
}

std::vector<LabeledUtterance> strip_tags(
    std::span<const LabeledUtterance> utterances) {
  std::vector<LabeledUtterance> out(utterances.begin(), utterances.end());
  for (LabeledUtterance& u : out) u.tags.reset();
  return out;
}

}  // namespace nerdistill::corpus
