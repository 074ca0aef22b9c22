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

#ifndef NERDISTILL_TAGGER_MODEL_H_
#define NERDISTILL_TAGGER_MODEL_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nerdistill/corpus/tags.h"
#include "nerdistill/corpus/utterance.h"
#include "nerdistill/corpus/vocabulary.h"
#include "nerdistill/rng.h"
#include "nerdistill/tagger/batch.h"
#include "nerdistill/tagger/config.h"

namespace nerdistill::tagger {

// Parameter and gradient storage. The base address is aligned to Eigen's
// maximum vector alignment so that two models with the same config take the
// same vectorized code paths and produce bitwise-identical results.
template <typename Scalar>
using ParamVector = std::vector<Scalar, Eigen::aligned_allocator<Scalar>>;

// A named row-major tensor inside the flat parameter arena.
struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

struct LayerTensors {
  TensorInfo ln1_gain, ln1_bias;
  TensorInfo wq, bq, wk, bk, wv, bv, wo, bo;
  TensorInfo ln2_gain, ln2_bias;
  TensorInfo w1, b1, w2, b2;
};

// Declaration order (also the checkpoint order):
//   token_embedding [V x d], position_embedding [max_len x d],
//   per layer: ln1 gain/bias [d], wq/bq, wk/bk, wv/bv, wo/bo ([d x d], [d]),
//              ln2 gain/bias [d], w1 [d x ff], b1 [ff], w2 [ff x d], b2 [d],
//   final_ln gain/bias [d], classifier [d x C], classifier_bias [C].
class ParameterLayout {
 public:
  explicit ParameterLayout(const TaggerConfig& config);

  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  std::size_t total() const { return total_; }

  const TensorInfo& token_embedding() const { return tensors_[0]; }
  const TensorInfo& position_embedding() const { return tensors_[1]; }
  const LayerTensors& layer(int l) const { return layers_[l]; }
  const TensorInfo& final_gain() const { return final_gain_; }
  const TensorInfo& final_bias() const { return final_bias_; }
  const TensorInfo& classifier() const { return classifier_; }
  const TensorInfo& classifier_bias() const { return classifier_bias_; }

 private:
  const TensorInfo& add(std::string name, int rows, int cols);

  std::vector<TensorInfo> tensors_;
  std::vector<LayerTensors> layers_;
  TensorInfo final_gain_, final_bias_, classifier_, classifier_bias_;
  std::size_t total_ = 0;
};

// Pre-layer-norm transformer encoder with learned absolute positions, GELU
// feed-forward blocks, a final layer norm and a linear classification head.
// Scalar is float for real use; double exists for gradient checking.
template <typename Scalar>
class BasicTaggerModel {
 public:
  // Parameters start zeroed; see init_model. Validates the config and that
  // vocab.size() == config.vocab_size.
  BasicTaggerModel(TaggerConfig config, corpus::Vocabulary vocab);

  const TaggerConfig& config() const { return config_; }
  const corpus::Vocabulary& vocab() const { return vocab_; }
  const ParameterLayout& layout() const { return layout_; }

  std::span<Scalar> parameters() { return params_; }
  std::span<const Scalar> parameters() const { return params_; }
  std::span<Scalar> tensor(const TensorInfo& info) {
    return std::span<Scalar>(params_).subspan(info.offset, info.size());
  }
  std::span<const Scalar> tensor(const TensorInfo& info) const {
    return std::span<const Scalar>(params_).subspan(info.offset, info.size());
  }

  bool all_finite() const;
  bool operator==(const BasicTaggerModel& other) const {
    return config_ == other.config_ && vocab_ == other.vocab_ &&
           params_ == other.params_;
  }

 private:
  TaggerConfig config_;
  corpus::Vocabulary vocab_;
  ParameterLayout layout_;
  ParamVector<Scalar> params_;
};

using TaggerModel = BasicTaggerModel<float>;

// Deterministic in config.seed. Embeddings ~ N(0, 0.02^2); projection and
// classifier weights ~ U(-1/sqrt(d_model), 1/sqrt(d_model)); biases 0;
// layer-norm gains 1. Throws ConfigError on an invalid config.
template <typename Scalar = float>
BasicTaggerModel<Scalar> init_model(const TaggerConfig& config,
                                    corpus::Vocabulary vocab);

// Closed-form parameter count for a config (what layout().total() yields).
std::size_t param_count(const TaggerConfig& config);
template <typename Scalar>
std::size_t param_count(const BasicTaggerModel<Scalar>& model) {
  return model.layout().total();
}

template <typename To, typename From>
BasicTaggerModel<To> cast_model(const BasicTaggerModel<From>& model) {
  BasicTaggerModel<To> out(model.config(), model.vocab());
  auto src = model.parameters();
  auto dst = out.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<To>(src[i]);
  return out;
}

// N x max_len x C, zero at padding positions.
template <typename Scalar>
struct Logits {
  int batch = 0;
  int max_len = 0;
  int classes = 0;
  std::vector<Scalar> values;

  Scalar at(int n, int t, int c) const {
    return values[(static_cast<std::size_t>(n) * max_len + t) * classes + c];
  }
  Scalar& at(int n, int t, int c) {
    return values[(static_cast<std::size_t>(n) * max_len + t) * classes + c];
  }
};

// One forward evaluation with everything backward() needs retained. In
// train mode dropout masks are drawn from dropout_rng (required when
// dropout_rate > 0); eval mode is deterministic.
template <typename Scalar>
class ForwardPass {
 public:
  ForwardPass(const BasicTaggerModel<Scalar>& model, const TrainingBatch& batch,
              bool train_mode, Rng* dropout_rng = nullptr);
  ~ForwardPass();
  ForwardPass(ForwardPass&&) noexcept;
  ForwardPass& operator=(ForwardPass&&) noexcept;

  const Logits<Scalar>& logits() const;
  // Gradient of cross_entropy(logits(), batch) with respect to every
  // parameter, in layout order. Exact for the sampled dropout masks.
  ParamVector<Scalar> backward() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

template <typename Scalar>
Logits<Scalar> forward(const BasicTaggerModel<Scalar>& model,
                       const TrainingBatch& batch, bool train_mode,
                       Rng* dropout_rng = nullptr) {
  return ForwardPass<Scalar>(model, batch, train_mode, dropout_rng).logits();
}

// Per-position argmax (ties go to the lowest class index) for positions
// < min(L, max_len); positions beyond max_len are O. No tag repair.
std::vector<corpus::Tag> predict(const TaggerModel& model,
                                 const corpus::LabeledUtterance& utterance);
// Batched variant; outputs are in input order.
std::vector<std::vector<corpus::Tag>> predict_batch(
    const TaggerModel& model,
    std::span<const corpus::LabeledUtterance> utterances);

// Lowest index among the maximal entries.
template <typename Scalar>
int argmax_lowest(std::span<const Scalar> values) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(values.size()); ++c) {
    if (values[c] > values[best]) best = c;
  }
  return best;
}

}  // namespace nerdistill::tagger

#endif  // NERDISTILL_TAGGER_MODEL_H_
