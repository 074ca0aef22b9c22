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

#ifndef NERDISTILL_TAGGER_LOSS_H_
#define NERDISTILL_TAGGER_LOSS_H_

#include "nerdistill/tagger/batch.h"
#include "nerdistill/tagger/model.h"

namespace nerdistill::tagger {

// Mean over target positions of -log softmax(logits)[gold], evaluated with
// log-sum-exp in double precision. Positions past a row's length or marked
// kIgnore do not count. Throws ValidationError when nothing counts.
template <typename Scalar>
double cross_entropy(const Logits<Scalar>& logits, const TrainingBatch& batch);

}  // namespace nerdistill::tagger

#endif  // NERDISTILL_TAGGER_LOSS_H_
