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

#include "nerdistill/distill/pseudo_label.h"

#include <algorithm>
#include <exception>
#include <thread>

#include "nerdistill/corpus/tags.h"
#include "nerdistill/error.h"
#include "nerdistill/tagger/checkpoint.h"

namespace nerdistill::distill {

std::vector<corpus::Tag> teacher_label(const tagger::TaggerModel& teacher,
                                       const corpus::LabeledUtterance& u) {
  return corpus::bio_repair(tagger::predict(teacher, u));
}

PseudoLabeledSet pseudo_label(const tagger::TaggerModel& teacher,
                              std::span<const corpus::LabeledUtterance> pool,
                              int workers) {
  if (pool.empty()) throw ValidationError("pseudo_label: pool is empty");
  if (workers < 1) throw ConfigError("pseudo_label: workers must be >= 1");
  PseudoLabeledSet out;
  out.utterances.assign(pool.begin(), pool.end());
  auto label_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out.utterances[i].tags = teacher_label(teacher, out.utterances[i]);
    }
  };
  const std::size_t n = out.utterances.size();
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (w == 1) {
    label_range(0, n);
  } else {
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t begin = std::min(n, k * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      threads.emplace_back([&, k, begin, end] {
        try {
          label_range(begin, end);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  out.teacher_id = tagger::model_id(teacher);
  out.stats = corpus::corpus_stats(out.utterances);
  return out;
}

bool hard_labels_consistent(const tagger::TaggerModel& teacher, const PseudoLabeledSet& set) {
  if (set.teacher_id != tagger::model_id(teacher)) return false;
  for (const auto& u : set.utterances) {
    if (!u.tags || *u.tags != teacher_label(teacher, u)) return false;
  }
  return corpus::corpus_stats(set.utterances) == set.stats;
}

}  // namespace nerdistill::distill
