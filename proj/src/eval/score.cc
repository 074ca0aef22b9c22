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

#include "nerdistill/eval/score.h"

#include <algorithm>
#include <string>

#include "nerdistill/error.h"

namespace nerdistill::eval {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::ordered_json counts_json(const SpanCounts& c) {
  return {{"tp", c.true_positives},   {"fp", c.false_positives},
          {"fn", c.false_negatives},  {"precision", c.precision()},
          {"recall", c.recall()},     {"f1", c.f1()}};
}

}  // namespace

double SpanCounts::precision() const {
  return ratio(true_positives, true_positives + false_positives);
}

double SpanCounts::recall() const {
  return ratio(true_positives, true_positives + false_negatives);
}

double SpanCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

SpanCounts& SpanCounts::operator+=(const SpanCounts& other) {
  true_positives += other.true_positives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  return *this;
}

double EvalResult::macro_f1() const {
  double sum = 0.0;
  for (const SpanCounts& c : per_type) sum += c.f1();
  return sum / static_cast<double>(per_type.size());
}

double EvalResult::token_accuracy() const { return ratio(correct_tokens, tokens); }

EvalResult& EvalResult::operator+=(const EvalResult& other) {
  for (std::size_t t = 0; t < per_type.size(); ++t) per_type[t] += other.per_type[t];
  micro += other.micro;
  utterances += other.utterances;
  tokens += other.tokens;
  correct_tokens += other.correct_tokens;
  return *this;
}

EvalResult score(std::span<const corpus::LabeledUtterance> gold,
                 std::span<const corpus::LabeledUtterance> pred) {
  if (gold.size() != pred.size()) {
    throw ValidationError("score: " + std::to_string(gold.size()) +
                          " gold utterances but " + std::to_string(pred.size()) +
                          " predictions");
  }
  EvalResult result;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const corpus::LabeledUtterance& g = gold[i];
    const corpus::LabeledUtterance& p = pred[i];
    if (g.id != p.id) {
      throw ValidationError("score: prediction id '" + p.id +
                            "' does not match gold id '" + g.id + "'");
    }
    if (!g.tags || !p.tags) {
      throw ValidationError("score: utterance '" + g.id + "' is missing tags");
    }
    if (g.tags->size() != p.tags->size() || g.tokens.size() != g.tags->size()) {
      throw ValidationError("score: length mismatch for '" + g.id + "'");
    }
    auto gold_spans = corpus::bio_decode(*g.tags);
    auto pred_spans = corpus::bio_decode(*p.tags);
    // Spans within one decode never repeat, so intersecting the sorted lists
    // is the one-to-one exact matching.
    std::sort(gold_spans.begin(), gold_spans.end());
    std::sort(pred_spans.begin(), pred_spans.end());
    std::vector<corpus::EntitySpan> matched;
    std::set_intersection(gold_spans.begin(), gold_spans.end(), pred_spans.begin(),
                          pred_spans.end(), std::back_inserter(matched));
    for (const auto& s : matched) ++result.per_type[static_cast<std::size_t>(s.type)].true_positives;
    for (const auto& s : pred_spans) ++result.per_type[static_cast<std::size_t>(s.type)].false_positives;
    for (const auto& s : gold_spans) ++result.per_type[static_cast<std::size_t>(s.type)].false_negatives;
    for (const auto& s : matched) {
      --result.per_type[static_cast<std::size_t>(s.type)].false_positives;
      --result.per_type[static_cast<std::size_t>(s.type)].false_negatives;
    }
    for (std::size_t t = 0; t < g.tags->size(); ++t) {
      result.correct_tokens += (*g.tags)[t] == (*p.tags)[t] ? 1 : 0;
    }
    result.tokens += g.tags->size();
    ++result.utterances;
  }
  for (const SpanCounts& c : result.per_type) result.micro += c;
  return result;
}

nlohmann::ordered_json to_json(const EvalResult& result) {
  nlohmann::ordered_json j;
  j["utterances"] = result.utterances;
  j["micro"] = counts_json(result.micro);
  j["macro_f1"] = result.macro_f1();
  nlohmann::ordered_json types;
  for (corpus::EntityType type : corpus::kEntityTypes) {
    types[std::string(corpus::entity_type_name(type))] = counts_json(result.of(type));
  }
  j["per_type"] = std::move(types);
  j["token_accuracy"] = result.token_accuracy();
  return j;
}

}  // namespace nerdistill::eval
