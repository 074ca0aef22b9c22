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

#include "nerdistill/corpus/noise.h"

#include <cctype>
#include <sstream>

#include "nerdistill/error.h"
#include "nerdistill/rng.h"

namespace nerdistill::corpus {
namespace {

void check_rate(std::string_view name, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError("noise." + std::string(name) + " must be in [0, 1], got " +
                      std::to_string(value));
  }
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::string lowercase(std::string token) {
  for (char& c : token) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return token;
}

}  // namespace

void NoiseConfig::validate() const {
  check_rate("lowercase_probability", lowercase_probability);
  check_rate("dysfluency_rate", dysfluency_rate);
  check_rate("repeat_rate", repeat_rate);
  if (dysfluency_rate > 0.0) {
    if (filler_lexicon.empty()) {
      throw ConfigError("noise.filler_lexicon is empty but dysfluency_rate > 0");
    }
    for (const std::string& filler : filler_lexicon) {
      if (split_words(filler).empty()) {
        throw ConfigError("noise.filler_lexicon contains a blank entry");
      }
    }
  }
}

bool is_punctuation_token(std::string_view token) {
  if (token.empty()) return false;
  for (unsigned char c : token) {
    if (!std::ispunct(c)) return false;
  }
  return true;
}

LabeledUtterance noisify(const LabeledUtterance& utterance,
                         const NoiseConfig& config) {
  if (!utterance.tags) {
    throw ValidationError("noisify needs gold tags on '" + utterance.id + "'");
  }
  validate_utterance(utterance);
  config.validate();
  const std::vector<std::string>& tokens = utterance.tokens;
  const std::vector<Tag>& tags = *utterance.tags;

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool drop = config.strip_punctuation && tags[i].is_outside() &&
                      is_punctuation_token(tokens[i]);
    if (!drop) kept.push_back(i);
  }
  if (kept.empty()) {
    for (std::size_t i = 0; i < tokens.size(); ++i) kept.push_back(i);
  }

  Rng rng(config.rng_seed);
  LabeledUtterance out;
  out.id = utterance.id;
  out.tags.emplace();
  auto emit = [&](const std::string& token, Tag tag) {
    const bool lower = bernoulli(rng, config.lowercase_probability);
    out.tokens.push_back(lower ? lowercase(token) : token);
    out.tags->push_back(tag);
  };

  for (std::size_t k = 0; k < kept.size(); ++k) {
    const std::size_t i = kept[k];
    if (tags[i].is_outside() && bernoulli(rng, config.repeat_rate)) {
      emit(tokens[i], Tag::outside());
    }
    emit(tokens[i], tags[i]);
    const bool next_continues =
        k + 1 < kept.size() && tags[kept[k + 1]].is_inside();
    if (!next_continues && bernoulli(rng, config.dysfluency_rate)) {
      const std::string& filler = config.filler_lexicon[uniform_index(
          rng, config.filler_lexicon.size())];
      for (const std::string& word : split_words(filler)) {
        out.tokens.push_back(word);
        out.tags->push_back(Tag::outside());
      }
    }
  }
  return out;
}

}  // namespace nerdistill::corpus
