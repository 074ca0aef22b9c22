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

#include "nerdistill/corpus/generator.h"

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "nerdistill/error.h"
#include "nerdistill/rng.h"

namespace nerdistill::corpus {
namespace {

enum class FillerSlot { kDay, kTime, kNumber, kItem };

const std::vector<std::string>& filler_values(FillerSlot slot) {
  static const std::vector<std::string> kDay = {
      "Monday",    "Tuesday",   "Wednesday", "Thursday", "Friday",
      "Saturday",  "Sunday",    "tomorrow",  "next week", "the weekend",
      "the first", "March",     "June",      "October",  "the fifteenth"};
  static const std::vector<std::string> kTime = {
      "noon",     "three",      "four thirty", "ten am",
      "two pm",   "eleven",     "the end of the day", "nine fifteen",
      "midnight", "half past one"};
  static const std::vector<std::string> kNumber = {
      "two hundred", "fifteen",  "forty two", "one thousand", "seven",
      "ninety nine", "three fifty", "twelve", "eighty", "six hundred"};
  static const std::vector<std::string> kItem = {
      "invoice",  "quote",   "contract",        "report",
      "spreadsheet", "proposal", "receipt",     "tracking number",
      "login link", "headset", "purchase order", "slides"};
  switch (slot) {
    case FillerSlot::kDay:
      return kDay;
    case FillerSlot::kTime:
      return kTime;
    case FillerSlot::kNumber:
      return kNumber;
    case FillerSlot::kItem:
      return kItem;
  }
  return kItem;
}

struct TemplatePiece {
  std::string literal;
  std::optional<EntityType> entity;
  std::optional<FillerSlot> filler;
};

struct ParsedTemplate {
  std::vector<TemplatePiece> pieces;
  std::array<bool, kNumEntityTypes> has_type{};
  bool has_entity() const {
    return has_type[0] || has_type[1] || has_type[2];
  }
};

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

ParsedTemplate parse_template(const std::string& text) {
  ParsedTemplate parsed;
  for (const std::string& word : split_words(text)) {
    TemplatePiece piece;
    if (word.size() > 2 && word.front() == '{' && word.back() == '}') {
      const std::string name = word.substr(1, word.size() - 2);
      if (auto type = parse_entity_type(name)) {
        piece.entity = *type;
        parsed.has_type[static_cast<std::size_t>(*type)] = true;
      } else if (name == "DAY") {
        piece.filler = FillerSlot::kDay;
      } else if (name == "TIME") {
        piece.filler = FillerSlot::kTime;
      } else if (name == "NUMBER") {
        piece.filler = FillerSlot::kNumber;
      } else if (name == "ITEM") {
        piece.filler = FillerSlot::kItem;
      } else {
        throw ConfigError("unknown template slot '" + word + "' in: " + text);
      }
    } else {
      piece.literal = word;
    }
    parsed.pieces.push_back(std::move(piece));
  }
  if (parsed.pieces.empty()) throw ConfigError("blank template");
  return parsed;
}

class UtteranceFactory {
 public:
  UtteranceFactory(const Gazetteers& gazetteers,
                   std::span<const std::string> templates)
      : gazetteers_(gazetteers) {
    if (templates.empty()) throw ConfigError("template list is empty");
    for (const std::string& text : templates) {
      ParsedTemplate parsed = parse_template(text);
      for (EntityType type : kEntityTypes) {
        if (!parsed.has_type[static_cast<std::size_t>(type)]) continue;
        auto it = gazetteers_.find(type);
        if (it == gazetteers_.end() || it->second.empty()) {
          throw ConfigError("gazetteer for " +
                            std::string(entity_type_name(type)) +
                            " is empty but a template uses it");
        }
      }
      const std::size_t index = parsed_.size();
      if (parsed.has_entity()) {
        entity_templates_.push_back(index);
        for (EntityType type : kEntityTypes) {
          if (parsed.has_type[static_cast<std::size_t>(type)]) {
            by_type_[static_cast<std::size_t>(type)].push_back(index);
          }
        }
      } else {
        plain_templates_.push_back(index);
      }
      parsed_.push_back(std::move(parsed));
    }
  }

  // Raw (pre-noise) utterance. primary is the type the template must
  // contain; nullopt asks for a template without entity slots.
  LabeledUtterance make(Rng& rng, std::optional<EntityType> primary) const {
    const ParsedTemplate& tpl = parsed_[pick_template(rng, primary)];
    LabeledUtterance u;
    std::vector<EntitySpan> spans;
    for (const TemplatePiece& piece : tpl.pieces) {
      if (piece.entity) {
        const auto& entries = gazetteers_.at(*piece.entity);
        const std::vector<std::string> words =
            split_words(entries[uniform_index(rng, entries.size())]);
        if (words.empty()) throw ConfigError("blank gazetteer entry");
        spans.push_back({*piece.entity, u.tokens.size(),
                         u.tokens.size() + words.size()});
        u.tokens.insert(u.tokens.end(), words.begin(), words.end());
      } else if (piece.filler) {
        const auto& values = filler_values(*piece.filler);
        for (const std::string& w :
             split_words(values[uniform_index(rng, values.size())])) {
          u.tokens.push_back(w);
        }
      } else {
        u.tokens.push_back(piece.literal);
      }
    }
    u.tags = bio_encode(spans, u.tokens.size());
    return u;
  }

  bool has_entity_templates() const { return !entity_templates_.empty(); }
  bool has_plain_templates() const { return !plain_templates_.empty(); }

 private:
  std::size_t pick_template(Rng& rng,
                            std::optional<EntityType> primary) const {
    const std::vector<std::size_t>* pool = nullptr;
    if (primary) {
      pool = &by_type_[static_cast<std::size_t>(*primary)];
      if (pool->empty()) pool = &entity_templates_;
    } else {
      pool = &plain_templates_;
    }
    if (pool->empty()) {
      pool = entity_templates_.empty() ? &plain_templates_ : &entity_templates_;
    }
    return (*pool)[uniform_index(rng, pool->size())];
  }

  const Gazetteers& gazetteers_;
  std::vector<ParsedTemplate> parsed_;
  std::vector<std::size_t> entity_templates_;
  std::vector<std::size_t> plain_templates_;
  std::array<std::vector<std::size_t>, kNumEntityTypes> by_type_;
};

// Balanced primary-type schedule: every block of three entity utterances
// uses each type once, in a shuffled order.
class TypeSchedule {
 public:
  EntityType next(Rng& rng) {
    if (pos_ == order_.size()) {
      order_ = {EntityType::kPerson, EntityType::kProdOrg,
                EntityType::kLocation};
      nerdistill::shuffle(order_.begin(), order_.end(), rng);
      pos_ = 0;
    }
    return order_[pos_++];
  }

 private:
  std::array<EntityType, kNumEntityTypes> order_{};
  std::size_t pos_ = kNumEntityTypes;
};

constexpr int kMaxAttempts = 200;

void fill(const UtteranceFactory& factory, std::size_t count,
          const std::string& prefix, std::uint64_t stream_seed,
          double entity_fraction, const NoiseConfig& noise,
          std::unordered_set<std::string>& seen,
          std::vector<LabeledUtterance>& out) {
  Rng rng(stream_seed);
  TypeSchedule schedule;
  const int width = 6;
  for (std::size_t n = 0; n < count; ++n) {
    const bool wants_entity = bernoulli(rng, entity_fraction);
    std::optional<EntityType> primary;
    if (wants_entity) primary = schedule.next(rng);
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      LabeledUtterance raw = factory.make(rng, primary);
      NoiseConfig utterance_noise = noise;
      utterance_noise.rng_seed =
          mix_seed(noise.rng_seed, mix_seed(stream_seed, out.size() * 1009 +
                                                             attempt));
      std::string id = std::to_string(n + 1);
      id = prefix + "-" + std::string(width - std::min<std::size_t>(
                                                  width, id.size()),
                                      '0') +
           id;
      raw.id = id;
      LabeledUtterance noisy = noisify(raw, utterance_noise);
      if (seen.insert(noisy.text()).second) {
        out.push_back(std::move(noisy));
        placed = true;
      }
    }
    if (!placed) {
      throw ConfigError(
          "could not generate enough distinct utterances for '" + prefix +
          "'; add templates or gazetteer entries");
    }
  }
}

}  // namespace

SplitSizes split_sizes(std::size_t count) {
  const double total = static_cast<double>(kTrainShare + kDevShare + kTestShare);
  SplitSizes sizes;
  sizes.train = static_cast<std::size_t>(
      std::llround(static_cast<double>(count) * kTrainShare / total));
  sizes.dev = static_cast<std::size_t>(
      std::llround(static_cast<double>(count) * kDevShare / total));
  sizes.test = count - sizes.train - sizes.dev;
  return sizes;
}

DatasetSplit generate_corpus(const Gazetteers& gazetteers,
                             std::span<const std::string> templates,
                             std::size_t count, const NoiseConfig& noise,
                             std::uint64_t seed,
                             const GeneratorOptions& options) {
  if (count < 10) {
    throw ConfigError("corpus count must be at least 10, got " +
                      std::to_string(count));
  }
  if (!(options.entity_fraction >= 0.0 && options.entity_fraction <= 1.0)) {
    throw ConfigError("entity_fraction must be in [0, 1]");
  }
  noise.validate();
  const UtteranceFactory factory(gazetteers, templates);
  const SplitSizes sizes = split_sizes(count);
  std::unordered_set<std::string> seen;
  DatasetSplit split;
  fill(factory, sizes.train, "train", mix_seed(seed, 1),
       options.entity_fraction, noise, seen, split.train);
  fill(factory, sizes.dev, "dev", mix_seed(seed, 2), options.entity_fraction,
       noise, seen, split.dev);
  fill(factory, sizes.test, "test", mix_seed(seed, 3), options.entity_fraction,
       noise, seen, split.test);
  return split;
}

std::vector<LabeledUtterance> generate_pool(
    const Gazetteers& gazetteers, std::span<const std::string> templates,
    std::size_t count, const NoiseConfig& noise, std::uint64_t seed,
    double entity_fraction, const DatasetSplit& exclude) {
  if (!(entity_fraction >= 0.0 && entity_fraction <= 1.0)) {
    throw ConfigError("pool entity_fraction must be in [0, 1]");
  }
  noise.validate();
  const UtteranceFactory factory(gazetteers, templates);
  std::unordered_set<std::string> seen;
  for (const auto* part : {&exclude.train, &exclude.dev, &exclude.test}) {
    for (const LabeledUtterance& u : *part) seen.insert(u.text());
  }
  std::vector<LabeledUtterance> pool;
  pool.reserve(count);
  fill(factory, count, "pool", mix_seed(seed, 4), entity_fraction, noise,
       seen, pool);
  return pool;
}

}  // namespace nerdistill::corpus
