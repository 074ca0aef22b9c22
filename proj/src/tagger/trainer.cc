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

#include "nerdistill/tagger/trainer.h"

#include <cmath>
#include <fstream>
#include <numeric>

#include "nerdistill/error.h"
#include "nerdistill/rng.h"
#include "nerdistill/tagger/loss.h"

namespace nerdistill::tagger {

AdamOptimizer::AdamOptimizer(std::size_t size, const TrainConfig& config)
    : lr_(config.learning_rate),
      beta1_(config.beta1),
      beta2_(config.beta2),
      eps_(config.epsilon),
      m_(size, 0.0f),
      v_(size, 0.0f) {}

void AdamOptimizer::step(std::span<float> params, std::span<const float> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const float b1 = static_cast<float>(beta1_);
  const float b2 = static_cast<float>(beta2_);
  const float step = static_cast<float>(lr_ / c1);
  const float inv_c2 = static_cast<float>(1.0 / c2);
  const float eps = static_cast<float>(eps_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const float g = grad[i];
    m_[i] = b1 * m_[i] + (1.0f - b1) * g;
    v_[i] = b2 * v_[i] + (1.0f - b2) * g * g;
    params[i] -= step * m_[i] / (std::sqrt(v_[i] * inv_c2) + eps);
  }
}

TrainResult train(TaggerModel& model,
                  std::span<const corpus::LabeledUtterance> data,
                  const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw ValidationError("train: empty training data");
  std::vector<std::vector<std::int32_t>> ids;
  std::vector<std::vector<std::int32_t>> targets;
  ids.reserve(data.size());
  targets.reserve(data.size());
  TrainResult result;
  const int max_len = model.config().max_len;
  for (const corpus::LabeledUtterance& u : data) {
    if (!u.tags) throw ValidationError("train: utterance '" + u.id + "' has no tags");
    corpus::validate_utterance(u, /*require_bio_valid=*/false);
    ids.push_back(model.vocab().encode(u.tokens));
    std::vector<std::int32_t> t;
    for (corpus::Tag tag : *u.tags) t.push_back(tag.index());
    targets.push_back(std::move(t));
    if (u.tokens.size() > static_cast<std::size_t>(max_len)) ++result.truncated;
  }
  if (result.truncated > 0) {
    result.warnings.push_back(std::to_string(result.truncated) +
                              " utterances truncated to max_len " +
                              std::to_string(max_len));
  }

  Rng order_rng(mix_seed(config.seed, 0));
  Rng dropout_rng(mix_seed(config.seed, 1));
  AdamOptimizer adam(model.parameters().size(), config);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    nerdistill::shuffle(order.begin(), order.end(), order_rng);
    double loss_sum = 0.0;
    std::size_t token_sum = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      const std::size_t end = std::min(order.size(), begin + batch_size);
      std::vector<std::vector<std::int32_t>> batch_ids;
      std::vector<std::vector<std::int32_t>> batch_targets;
      for (std::size_t i = begin; i < end; ++i) {
        batch_ids.push_back(ids[order[i]]);
        batch_targets.push_back(targets[order[i]]);
      }
      const TrainingBatch batch = make_batch(batch_ids, batch_targets, max_len);
      const ForwardPass<float> pass(model, batch, /*train_mode=*/true, &dropout_rng);
      const std::size_t tokens = batch.effective_tokens();
      loss_sum += cross_entropy(pass.logits(), batch) * static_cast<double>(tokens);
      token_sum += tokens;
      const ParamVector<float> grad = pass.backward();
      adam.step(model.parameters(), grad);
      ++result.steps;
    }
    if (!model.all_finite()) {
      throw ValidationError("train: non-finite parameter after epoch " +
                            std::to_string(epoch + 1));
    }
    result.epoch_losses.push_back(loss_sum / static_cast<double>(token_sum));
  }
  return result;
}

double token_accuracy(const TaggerModel& model,
                      std::span<const corpus::LabeledUtterance> data) {
  const auto predictions = predict_batch(model, data);
  std::size_t correct = 0;
  std::size_t total = 0;
  const auto max_len = static_cast<std::size_t>(model.config().max_len);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].tags) continue;
    const auto& gold = *data[i].tags;
    for (std::size_t t = 0; t < std::min(gold.size(), max_len); ++t) {
      correct += predictions[i][t] == gold[t] ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

void write_loss_log(const std::vector<double>& epoch_losses,
                    const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,mean_loss\n";
  out.precision(17);
  for (std::size_t e = 0; e < epoch_losses.size(); ++e) {
    out << (e + 1) << ',' << epoch_losses[e] << '\n';
  }
}

}  // namespace nerdistill::tagger
