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

#include "nerdistill/tagger/model.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "nerdistill/error.h"

namespace nerdistill::tagger {
namespace {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using RowArray = Eigen::Array<S, 1, Eigen::Dynamic>;

constexpr double kLayerNormEps = 1e-5;

template <typename S>
Eigen::Map<const Mat<S>> view(std::span<const S> params, const TensorInfo& t) {
  return Eigen::Map<const Mat<S>>(params.data() + t.offset, t.rows, t.cols);
}

template <typename S>
Eigen::Map<Mat<S>> view(std::span<S> params, const TensorInfo& t) {
  return Eigen::Map<Mat<S>>(params.data() + t.offset, t.rows, t.cols);
}

template <typename S>
Eigen::Map<const RowArray<S>> row_view(std::span<const S> params,
                                       const TensorInfo& t) {
  return Eigen::Map<const RowArray<S>>(params.data() + t.offset, t.size());
}

template <typename S>
Eigen::Map<RowArray<S>> row_view(std::span<S> params, const TensorInfo& t) {
  return Eigen::Map<RowArray<S>>(params.data() + t.offset, t.size());
}

template <typename S>
struct NormCache {
  Mat<S> xhat;
  Vec<S> rstd;
};

template <typename S>
void layer_norm_forward(const Mat<S>& x, const Eigen::Map<const RowArray<S>>& gain,
                        const Eigen::Map<const RowArray<S>>& bias,
                        NormCache<S>& cache, Mat<S>& y) {
  const Vec<S> mean = x.rowwise().mean();
  Mat<S> centered = x.colwise() - mean;
  const Vec<S> var = centered.array().square().rowwise().mean().matrix();
  cache.rstd = (var.array() + static_cast<S>(kLayerNormEps)).rsqrt().matrix();
  cache.xhat = (centered.array().colwise() * cache.rstd.array()).matrix();
  y = ((cache.xhat.array().rowwise() * gain).rowwise() + bias).matrix();
}

// Accumulates gain/bias gradients and returns dL/dx.
template <typename S>
Mat<S> layer_norm_backward(const Mat<S>& dy, const NormCache<S>& cache,
                           const Eigen::Map<const RowArray<S>>& gain,
                           Eigen::Map<RowArray<S>> dgain,
                           Eigen::Map<RowArray<S>> dbias) {
  dgain += (dy.array() * cache.xhat.array()).colwise().sum();
  dbias += dy.array().colwise().sum();
  const Mat<S> dxhat = (dy.array().rowwise() * gain).matrix();
  const Vec<S> mean_d = dxhat.rowwise().mean();
  const Vec<S> mean_dx = (dxhat.array() * cache.xhat.array()).rowwise().mean().matrix();
  Mat<S> dx = (dxhat.colwise() - mean_d).array() -
              cache.xhat.array().colwise() * mean_dx.array();
  dx.array().colwise() *= cache.rstd.array();
  return dx;
}

template <typename S>
S gelu(S x) {
  return static_cast<S>(0.5) * x *
         (static_cast<S>(1) + std::erf(x * static_cast<S>(std::numbers::sqrt2 / 2)));
}

template <typename S>
S gelu_grad(S x) {
  const S cdf = static_cast<S>(0.5) *
                (static_cast<S>(1) + std::erf(x * static_cast<S>(std::numbers::sqrt2 / 2)));
  const S pdf = std::exp(static_cast<S>(-0.5) * x * x) *
                static_cast<S>(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

template <typename S>
Mat<S> dropout_mask(int rows, int cols, double rate, Rng& rng) {
  Mat<S> mask(rows, cols);
  const S keep = static_cast<S>(1.0 / (1.0 - rate));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      mask(i, j) = bernoulli(rng, rate) ? S(0) : keep;
    }
  }
  return mask;
}

double normal_sample(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ParameterLayout::ParameterLayout(const TaggerConfig& c) {
  const int d = c.d_model;
  add("token_embedding", c.vocab_size, d);
  add("position_embedding", c.max_len, d);
  for (int l = 0; l < c.n_layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    LayerTensors lt;
    lt.ln1_gain = add(p + "ln1.gain", 1, d);
    lt.ln1_bias = add(p + "ln1.bias", 1, d);
    lt.wq = add(p + "attn.wq", d, d);
    lt.bq = add(p + "attn.bq", 1, d);
    lt.wk = add(p + "attn.wk", d, d);
    lt.bk = add(p + "attn.bk", 1, d);
    lt.wv = add(p + "attn.wv", d, d);
    lt.bv = add(p + "attn.bv", 1, d);
    lt.wo = add(p + "attn.wo", d, d);
    lt.bo = add(p + "attn.bo", 1, d);
    lt.ln2_gain = add(p + "ln2.gain", 1, d);
    lt.ln2_bias = add(p + "ln2.bias", 1, d);
    lt.w1 = add(p + "ff.w1", d, c.d_ff);
    lt.b1 = add(p + "ff.b1", 1, c.d_ff);
    lt.w2 = add(p + "ff.w2", c.d_ff, d);
    lt.b2 = add(p + "ff.b2", 1, d);
    layers_.push_back(std::move(lt));
  }
  final_gain_ = add("final_ln.gain", 1, d);
  final_bias_ = add("final_ln.bias", 1, d);
  classifier_ = add("classifier.weight", d, c.n_classes);
  classifier_bias_ = add("classifier.bias", 1, c.n_classes);
}

const TensorInfo& ParameterLayout::add(std::string name, int rows, int cols) {
  TensorInfo info{std::move(name), rows, cols, total_};
  total_ += info.size();
  tensors_.push_back(std::move(info));
  return tensors_.back();
}

std::size_t param_count(const TaggerConfig& config) {
  return ParameterLayout(config).total();
}

template <typename Scalar>
BasicTaggerModel<Scalar>::BasicTaggerModel(TaggerConfig config,
                                           corpus::Vocabulary vocab)
    : config_((config.validate(), config)),
      vocab_(std::move(vocab)),
      layout_(config_),
      params_(layout_.total(), Scalar(0)) {
  if (vocab_.size() != static_cast<std::size_t>(config_.vocab_size)) {
    throw ConfigError("vocabulary has " + std::to_string(vocab_.size()) +
                      " entries but config.vocab_size is " +
                      std::to_string(config_.vocab_size));
  }
}

template <typename Scalar>
bool BasicTaggerModel<Scalar>::all_finite() const {
  return std::all_of(params_.begin(), params_.end(),
                     [](Scalar v) { return std::isfinite(v); });
}

template <typename Scalar>
BasicTaggerModel<Scalar> init_model(const TaggerConfig& config,
                                    corpus::Vocabulary vocab) {
  BasicTaggerModel<Scalar> model(config, std::move(vocab));
  Rng rng(config.seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.d_model));
  for (const TensorInfo& t : model.layout().tensors()) {
    auto values = model.tensor(t);
    if (ends_with(t.name, "embedding")) {
      for (Scalar& v : values) v = static_cast<Scalar>(0.02 * normal_sample(rng));
    } else if (ends_with(t.name, ".gain")) {
      std::fill(values.begin(), values.end(), Scalar(1));
    } else if (t.rows == 1) {
      std::fill(values.begin(), values.end(), Scalar(0));
    } else {
      for (Scalar& v : values) {
        v = static_cast<Scalar>((2.0 * uniform01(rng) - 1.0) * bound);
      }
    }
  }
  return model;
}

template <typename Scalar>
struct ForwardPass<Scalar>::State {
  struct Layer {
    Mat<Scalar> x_in;
    NormCache<Scalar> ln1;
    Mat<Scalar> h1, q, k, v;
    ParamVector<Scalar> probs;
    Mat<Scalar> attn;
    Mat<Scalar> o_mask;
    Mat<Scalar> x_mid;
    NormCache<Scalar> ln2;
    Mat<Scalar> h2, u, f;
    Mat<Scalar> g_mask;
  };

  const BasicTaggerModel<Scalar>* model = nullptr;
  const TrainingBatch* batch = nullptr;
  std::vector<int> offsets;
  int rows = 0;
  std::vector<std::int32_t> ids;
  std::vector<int> positions;
  Mat<Scalar> emb_mask;
  std::vector<Layer> layers;
  NormCache<Scalar> final_norm;
  Mat<Scalar> hf;
  Mat<Scalar> packed_logits;
  Logits<Scalar> logits;
};

template <typename Scalar>
ForwardPass<Scalar>::ForwardPass(const BasicTaggerModel<Scalar>& model,
                                 const TrainingBatch& batch, bool train_mode,
                                 Rng* dropout_rng)
    : state_(std::make_unique<State>()) {
  const TaggerConfig& c = model.config();
  const ParameterLayout& lay = model.layout();
  const auto params = model.parameters();
  State& st = *state_;
  st.model = &model;
  st.batch = &batch;
  const double rate = train_mode ? c.dropout_rate : 0.0;
  if (rate > 0.0 && dropout_rng == nullptr) {
    throw ValidationError("train-mode forward with dropout needs an rng");
  }

  const int n = batch.size();
  st.offsets.resize(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    const int len = std::min(batch.lengths[i], std::min(batch.max_len, c.max_len));
    if (len <= 0) throw ValidationError("forward: empty sequence in batch");
    st.offsets[i + 1] = st.offsets[i] + len;
  }
  st.rows = st.offsets[n];
  const int d = c.d_model;
  const int heads = c.n_heads;
  const int dh = d / heads;
  const Scalar scale = static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(dh)));

  st.ids.resize(st.rows);
  st.positions.resize(st.rows);
  Mat<Scalar> x(st.rows, d);
  const auto tok = view(params, lay.token_embedding());
  const auto pos = view(params, lay.position_embedding());
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < st.offsets[i + 1] - st.offsets[i]; ++t) {
      const int r = st.offsets[i] + t;
      std::int32_t id = batch.token(i, t);
      if (id < 0 || id >= c.vocab_size) {
        throw ValidationError("token id " + std::to_string(id) +
                              " outside vocabulary");
      }
      st.ids[r] = id;
      st.positions[r] = t;
      x.row(r) = tok.row(id) + pos.row(t);
    }
  }
  if (rate > 0.0) {
    st.emb_mask = dropout_mask<Scalar>(st.rows, d, rate, *dropout_rng);
    x.array() *= st.emb_mask.array();
  }

  st.layers.resize(c.n_layers);
  for (int l = 0; l < c.n_layers; ++l) {
    const LayerTensors& lt = lay.layer(l);
    auto& L = st.layers[l];
    L.x_in = x;
    layer_norm_forward(L.x_in, row_view(params, lt.ln1_gain),
                       row_view(params, lt.ln1_bias), L.ln1, L.h1);
    L.q = (L.h1 * view(params, lt.wq)).rowwise() + row_view(params, lt.bq).matrix();
    L.k = (L.h1 * view(params, lt.wk)).rowwise() + row_view(params, lt.bk).matrix();
    L.v = (L.h1 * view(params, lt.wv)).rowwise() + row_view(params, lt.bv).matrix();
    L.attn.resize(st.rows, d);
    std::size_t probs_size = 0;
    for (int i = 0; i < n; ++i) {
      const std::size_t len = st.offsets[i + 1] - st.offsets[i];
      probs_size += heads * len * len;
    }
    L.probs.resize(probs_size);
    std::size_t probs_at = 0;
    for (int i = 0; i < n; ++i) {
      const int off = st.offsets[i];
      const int len = st.offsets[i + 1] - off;
      for (int h = 0; h < heads; ++h) {
        Eigen::Map<Mat<Scalar>> p(L.probs.data() + probs_at, len, len);
        probs_at += static_cast<std::size_t>(len) * len;
        p.noalias() = L.q.block(off, h * dh, len, dh) *
                      L.k.block(off, h * dh, len, dh).transpose();
        p *= scale;
        for (int r = 0; r < len; ++r) {
          const Scalar m = p.row(r).maxCoeff();
          p.row(r) = (p.row(r).array() - m).exp().matrix();
          p.row(r) /= p.row(r).sum();
        }
        L.attn.block(off, h * dh, len, dh).noalias() =
            p * L.v.block(off, h * dh, len, dh);
      }
    }
    Mat<Scalar> o =
        (L.attn * view(params, lt.wo)).rowwise() + row_view(params, lt.bo).matrix();
    if (rate > 0.0) {
      L.o_mask = dropout_mask<Scalar>(st.rows, d, rate, *dropout_rng);
      o.array() *= L.o_mask.array();
    }
    L.x_mid = L.x_in + o;
    layer_norm_forward(L.x_mid, row_view(params, lt.ln2_gain),
                       row_view(params, lt.ln2_bias), L.ln2, L.h2);
    L.u = (L.h2 * view(params, lt.w1)).rowwise() + row_view(params, lt.b1).matrix();
    L.f = L.u.unaryExpr([](Scalar z) { return gelu(z); });
    Mat<Scalar> g =
        (L.f * view(params, lt.w2)).rowwise() + row_view(params, lt.b2).matrix();
    if (rate > 0.0) {
      L.g_mask = dropout_mask<Scalar>(st.rows, d, rate, *dropout_rng);
      g.array() *= L.g_mask.array();
    }
    x = L.x_mid + g;
  }
  layer_norm_forward(x, row_view(params, lay.final_gain()),
                     row_view(params, lay.final_bias()), st.final_norm, st.hf);
  st.packed_logits = (st.hf * view(params, lay.classifier())).rowwise() +
                     row_view(params, lay.classifier_bias()).matrix();

  Logits<Scalar>& out = st.logits;
  out.batch = n;
  out.max_len = batch.max_len;
  out.classes = c.n_classes;
  out.values.assign(static_cast<std::size_t>(n) * batch.max_len * c.n_classes,
                    Scalar(0));
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < st.offsets[i + 1] - st.offsets[i]; ++t) {
      for (int k = 0; k < c.n_classes; ++k) {
        out.at(i, t, k) = st.packed_logits(st.offsets[i] + t, k);
      }
    }
  }
}

template <typename Scalar>
ForwardPass<Scalar>::~ForwardPass() = default;
template <typename Scalar>
ForwardPass<Scalar>::ForwardPass(ForwardPass&&) noexcept = default;
template <typename Scalar>
ForwardPass<Scalar>& ForwardPass<Scalar>::operator=(ForwardPass&&) noexcept = default;

template <typename Scalar>
const Logits<Scalar>& ForwardPass<Scalar>::logits() const {
  return state_->logits;
}

template <typename Scalar>
ParamVector<Scalar> ForwardPass<Scalar>::backward() const {
  const State& st = *state_;
  const BasicTaggerModel<Scalar>& model = *st.model;
  const TrainingBatch& batch = *st.batch;
  const TaggerConfig& c = model.config();
  const ParameterLayout& lay = model.layout();
  const auto params = model.parameters();
  ParamVector<Scalar> grad_storage(lay.total(), Scalar(0));
  std::span<Scalar> grad(grad_storage);
  const int n = batch.size();
  const int d = c.d_model;
  const int heads = c.n_heads;
  const int dh = d / heads;
  const Scalar scale = static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(dh)));

  std::size_t targets = 0;
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < st.offsets[i + 1] - st.offsets[i]; ++t) {
      if (batch.target(i, t) != TrainingBatch::kIgnore) ++targets;
    }
  }
  if (targets == 0) {
    throw ValidationError("backward: batch has no target positions");
  }

  // d loss / d logits = (softmax - onehot) / N over target positions.
  Mat<Scalar> dlogits = Mat<Scalar>::Zero(st.rows, c.n_classes);
  const Scalar inv_n = static_cast<Scalar>(1.0 / static_cast<double>(targets));
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < st.offsets[i + 1] - st.offsets[i]; ++t) {
      const std::int32_t y = batch.target(i, t);
      if (y == TrainingBatch::kIgnore) continue;
      const int r = st.offsets[i] + t;
      const auto row = st.packed_logits.row(r);
      const Scalar m = row.maxCoeff();
      auto e = (row.array() - m).exp();
      const Scalar z = e.sum();
      dlogits.row(r) = (e / z * inv_n).matrix();
      dlogits(r, y) -= inv_n;
    }
  }

  view(grad, lay.classifier()).noalias() += st.hf.transpose() * dlogits;
  row_view(grad, lay.classifier_bias()) += dlogits.array().colwise().sum();
  Mat<Scalar> dh_final = dlogits * view(params, lay.classifier()).transpose();
  Mat<Scalar> dx = layer_norm_backward(
      dh_final, st.final_norm, row_view(params, lay.final_gain()),
      row_view(grad, lay.final_gain()), row_view(grad, lay.final_bias()));

  for (int l = c.n_layers - 1; l >= 0; --l) {
    const LayerTensors& lt = lay.layer(l);
    const auto& L = st.layers[l];

    Mat<Scalar> dg = dx;
    if (L.g_mask.size() > 0) dg.array() *= L.g_mask.array();
    view(grad, lt.w2).noalias() += L.f.transpose() * dg;
    row_view(grad, lt.b2) += dg.array().colwise().sum();
    Mat<Scalar> du = dg * view(params, lt.w2).transpose();
    du.array() *= L.u.unaryExpr([](Scalar z) { return gelu_grad(z); }).array();
    view(grad, lt.w1).noalias() += L.h2.transpose() * du;
    row_view(grad, lt.b1) += du.array().colwise().sum();
    const Mat<Scalar> dh2 = du * view(params, lt.w1).transpose();
    const Mat<Scalar> dx_mid =
        dx + layer_norm_backward(dh2, L.ln2, row_view(params, lt.ln2_gain),
                                 row_view(grad, lt.ln2_gain),
                                 row_view(grad, lt.ln2_bias));

    Mat<Scalar> dout = dx_mid;
    if (L.o_mask.size() > 0) dout.array() *= L.o_mask.array();
    view(grad, lt.wo).noalias() += L.attn.transpose() * dout;
    row_view(grad, lt.bo) += dout.array().colwise().sum();
    const Mat<Scalar> dattn = dout * view(params, lt.wo).transpose();

    Mat<Scalar> dq = Mat<Scalar>::Zero(st.rows, d);
    Mat<Scalar> dk = Mat<Scalar>::Zero(st.rows, d);
    Mat<Scalar> dv = Mat<Scalar>::Zero(st.rows, d);
    std::size_t probs_at = 0;
    for (int i = 0; i < n; ++i) {
      const int off = st.offsets[i];
      const int len = st.offsets[i + 1] - off;
      for (int h = 0; h < heads; ++h) {
        Eigen::Map<const Mat<Scalar>> p(L.probs.data() + probs_at, len, len);
        probs_at += static_cast<std::size_t>(len) * len;
        const auto da = dattn.block(off, h * dh, len, dh);
        const Mat<Scalar> dp = da * L.v.block(off, h * dh, len, dh).transpose();
        dv.block(off, h * dh, len, dh).noalias() = p.transpose() * da;
        const Vec<Scalar> inner = (dp.array() * p.array()).rowwise().sum().matrix();
        Mat<Scalar> ds = (p.array() * (dp.colwise() - inner).array()).matrix();
        ds *= scale;
        dq.block(off, h * dh, len, dh).noalias() = ds * L.k.block(off, h * dh, len, dh);
        dk.block(off, h * dh, len, dh).noalias() =
            ds.transpose() * L.q.block(off, h * dh, len, dh);
      }
    }
    view(grad, lt.wq).noalias() += L.h1.transpose() * dq;
    view(grad, lt.wk).noalias() += L.h1.transpose() * dk;
    view(grad, lt.wv).noalias() += L.h1.transpose() * dv;
    row_view(grad, lt.bq) += dq.array().colwise().sum();
    row_view(grad, lt.bk) += dk.array().colwise().sum();
    row_view(grad, lt.bv) += dv.array().colwise().sum();
    Mat<Scalar> dh1 = dq * view(params, lt.wq).transpose();
    dh1.noalias() += dk * view(params, lt.wk).transpose();
    dh1.noalias() += dv * view(params, lt.wv).transpose();
    dx = dx_mid + layer_norm_backward(dh1, L.ln1, row_view(params, lt.ln1_gain),
                                      row_view(grad, lt.ln1_gain),
                                      row_view(grad, lt.ln1_bias));
  }

  if (st.emb_mask.size() > 0) dx.array() *= st.emb_mask.array();
  auto dtok = view(grad, lay.token_embedding());
  auto dpos = view(grad, lay.position_embedding());
  for (int r = 0; r < st.rows; ++r) {
    dtok.row(st.ids[r]) += dx.row(r);
    dpos.row(st.positions[r]) += dx.row(r);
  }
  return grad_storage;
}

std::vector<std::vector<corpus::Tag>> predict_batch(
    const TaggerModel& model,
    std::span<const corpus::LabeledUtterance> utterances) {
  std::vector<std::vector<corpus::Tag>> out;
  out.reserve(utterances.size());
  const int max_len = model.config().max_len;
  const int classes = model.config().n_classes;
  constexpr std::size_t kChunk = 32;
  for (std::size_t begin = 0; begin < utterances.size(); begin += kChunk) {
    const auto chunk = utterances.subspan(
        begin, std::min(kChunk, utterances.size() - begin));
    std::vector<std::vector<std::int32_t>> ids;
    std::vector<std::vector<std::int32_t>> no_targets(chunk.size());
    for (const auto& u : chunk) {
      if (u.tokens.empty()) throw ValidationError("predict: empty utterance");
      ids.push_back(model.vocab().encode(u.tokens));
    }
    const TrainingBatch batch = make_batch(ids, no_targets, max_len);
    const Logits<float> logits = forward(model, batch, /*train_mode=*/false);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      std::vector<corpus::Tag> tags(chunk[i].tokens.size(), corpus::Tag::outside());
      for (int t = 0; t < batch.lengths[i]; ++t) {
        const float* row = &logits.values[(i * max_len + t) * classes];
        tags[t] = corpus::Tag::from_index(
            argmax_lowest(std::span<const float>(row, classes)));
      }
      out.push_back(std::move(tags));
    }
  }
  return out;
}

std::vector<corpus::Tag> predict(const TaggerModel& model,
                                 const corpus::LabeledUtterance& utterance) {
  return std::move(predict_batch(model, std::span(&utterance, 1)).front());
}

template class BasicTaggerModel<float>;
template class BasicTaggerModel<double>;
template class ForwardPass<float>;
template class ForwardPass<double>;
template BasicTaggerModel<float> init_model<float>(const TaggerConfig&,
                                                   corpus::Vocabulary);
template BasicTaggerModel<double> init_model<double>(const TaggerConfig&,
                                                     corpus::Vocabulary);

}  // namespace nerdistill::tagger
