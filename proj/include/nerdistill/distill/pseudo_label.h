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

#ifndef NERDISTILL_DISTILL_PSEUDO_LABEL_H_
#define NERDISTILL_DISTILL_PSEUDO_LABEL_H_

#include <span>
#include <string>
#include <vector>

#include "nerdistill/corpus/stats.h"
#include "nerdistill/corpus/utterance.h"
#include "nerdistill/tagger/model.h"

namespace nerdistill::distill {

struct PseudoLabeledSet {
  std::vector<corpus::LabeledUtterance> utterances;
  std::string teacher_id;  // tagger::model_id of the labeling teacher
  corpus::CorpusStats stats;
};

// The teacher's hard label for one utterance: argmax tags passed through
// corpus::bio_repair so the stored sequence is always BIO-valid. Decoding
// the result gives the same spans as decoding the raw argmax.
std::vector<corpus::Tag> teacher_label(const tagger::TaggerModel& teacher,
                                       const corpus::LabeledUtterance& u);

// Labels every pool utterance with teacher_label, keeping input order and
// keeping utterances with no predicted entity. Input tags are ignored and
// replaced. `workers` > 1 splits the pool into contiguous chunks, one
// thread each; the output does not depend on the worker count. Throws
// ValidationError on an empty pool.
PseudoLabeledSet pseudo_label(const tagger::TaggerModel& teacher,
                              std::span<const corpus::LabeledUtterance> pool,
                              int workers = 1);

// True iff every stored sequence equals teacher_label now and the stats
// and teacher id match the contents.
bool hard_labels_consistent(const tagger::TaggerModel& teacher, const PseudoLabeledSet& set);

}  // namespace nerdistill::distill

#endif  // NERDISTILL_DISTILL_PSEUDO_LABEL_H_
