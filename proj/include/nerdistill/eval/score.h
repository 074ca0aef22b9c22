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

#ifndef NERDISTILL_EVAL_SCORE_H_
#define NERDISTILL_EVAL_SCORE_H_

#include <array>
#include <cstddef>
#include <span>

#include "json.hpp"
#include "nerdistill/corpus/utterance.h"

namespace nerdistill::eval {

struct SpanCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  // 0 when the denominator is 0.
  double precision() const;
  double recall() const;
  // 2PR / (P + R), or 0 when P + R = 0.
  double f1() const;

  SpanCounts& operator+=(const SpanCounts& other);
  bool operator==(const SpanCounts&) const = default;
};

// Entity-level exact-match scores: a predicted span is correct iff its
// type, start and end all equal a gold span's.
struct EvalResult {
  std::array<SpanCounts, corpus::kNumEntityTypes> per_type{};
  SpanCounts micro;
  std::size_t utterances = 0;
  // Token-level bookkeeping, reported but never used for acceptance.
  std::size_t tokens = 0;
  std::size_t correct_tokens = 0;

  const SpanCounts& of(corpus::EntityType type) const {
    return per_type[static_cast<std::size_t>(type)];
  }
  double micro_f1() const { return micro.f1(); }
  // Unweighted mean of per-type F1.
  double macro_f1() const;
  double token_accuracy() const;

  EvalResult& operator+=(const EvalResult& other);
};

// gold[i] and pred[i] must share id and token count. Predicted tags may be
// BIO-invalid; they go through corpus::bio_decode. Throws ValidationError
// naming the offending id.
EvalResult score(std::span<const corpus::LabeledUtterance> gold,
                 std::span<const corpus::LabeledUtterance> pred);

nlohmann::ordered_json to_json(const EvalResult& result);

}  // namespace nerdistill::eval

#endif  // NERDISTILL_EVAL_SCORE_H_
