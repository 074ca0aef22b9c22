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

#ifndef NERDISTILL_TAGGER_TRAINER_H_
#define NERDISTILL_TAGGER_TRAINER_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nerdistill/corpus/utterance.h"
#include "nerdistill/tagger/config.h"
#include "nerdistill/tagger/model.h"

namespace nerdistill::tagger {

// Adam without weight decay or schedule, with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, const TrainConfig& config);

  void step(std::span<float> params, std::span<const float> grad);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<float> m_, v_;
  std::size_t t_ = 0;
};

struct TrainResult {
  // Token-weighted mean training loss per epoch.
  std::vector<double> epoch_losses;
  std::size_t steps = 0;
  std::size_t truncated = 0;
  std::vector<std::string> warnings;
};

// Mini-batch training in place. Single-threaded and fully determined by
// (model, data, config): the shuffle order and dropout masks come from
// config.seed. Throws ValidationError for empty or untagged data, or when
// a parameter becomes non-finite.
TrainResult train(TaggerModel& model,
                  std::span<const corpus::LabeledUtterance> data,
                  const TrainConfig& config);

// Fraction of tokens (up to max_len) whose argmax tag equals the gold tag.
double token_accuracy(const TaggerModel& model,
                      std::span<const corpus::LabeledUtterance> data);

// "epoch,mean_loss" CSV.
void write_loss_log(const std::vector<double>& epoch_losses,
                    const std::filesystem::path& path);

}  // namespace nerdistill::tagger

#endif  // NERDISTILL_TAGGER_TRAINER_H_
