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

#include "nerdistill/tagger/loss.h"

#include <algorithm>
#include <cmath>

#include "nerdistill/error.h"

namespace nerdistill::tagger {

template <typename Scalar>
double cross_entropy(const Logits<Scalar>& logits, const TrainingBatch& batch) {
  if (logits.batch != batch.size() || logits.max_len != batch.max_len) {
    throw ValidationError("cross_entropy: logits shape does not match batch");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (int n = 0; n < batch.size(); ++n) {
    const int len = std::min(batch.lengths[n], batch.max_len);
    for (int t = 0; t < len; ++t) {
      const std::int32_t y = batch.target(n, t);
      if (y == TrainingBatch::kIgnore) continue;
      if (y < 0 || y >= logits.classes) {
        throw ValidationError("cross_entropy: target class out of range");
      }
      double m = logits.at(n, t, 0);
      for (int c = 1; c < logits.classes; ++c) {
        m = std::max(m, static_cast<double>(logits.at(n, t, c)));
      }
      double sum = 0.0;
      for (int c = 0; c < logits.classes; ++c) {
        sum += std::exp(static_cast<double>(logits.at(n, t, c)) - m);
      }
      total += m + std::log(sum) - static_cast<double>(logits.at(n, t, y));
      ++count;
    }
  }
  if (count == 0) {
    throw ValidationError("cross_entropy: every position is ignored");
  }
  return total / static_cast<double>(count);
}

template double cross_entropy<float>(const Logits<float>&, const TrainingBatch&);
template double cross_entropy<double>(const Logits<double>&, const TrainingBatch&);

}  // namespace nerdistill::tagger
