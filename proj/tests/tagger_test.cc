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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "nerdistill/corpus/generator.h"
#include "nerdistill/corpus/vocabulary.h"
#include "nerdistill/error.h"
#include "nerdistill/tagger/checkpoint.h"
#include "nerdistill/tagger/loss.h"
#include "nerdistill/tagger/model.h"
#include "nerdistill/tagger/trainer.h"
#include "test_util.h"

namespace nc = nerdistill::corpus;
namespace ng = nerdistill::tagger;
namespace nt = nerdistill::testing;

namespace {

nc::Vocabulary synthetic_vocab(int size) {
  std::vector<std::string> tokens = {"<pad>", "<unk>"};
  for (int i = 2; i < size; ++i) tokens.push_back("t" + std::to_string(i));
  return nc::Vocabulary::from_tokens(tokens);
}

ng::TaggerConfig tiny_config() {
  ng::TaggerConfig c;
  c.vocab_size = 10;
  c.d_model = 8;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_len = 6;
  c.dropout_rate = 0.0;
  c.seed = 3;
  return c;
}

ng::TrainingBatch tiny_batch() {
  std::vector<std::vector<std::int32_t>> ids = {{2, 5, 7, 3}, {9, 4, 4}};
  std::vector<std::vector<std::int32_t>> targets = {{0, 1, 2, 0}, {5, 6, 3}};
  return ng::make_batch(ids, targets, 6);
}

// Independent closed form for the documented architecture.
std::size_t closed_form_count(std::size_t V, std::size_t d, std::size_t layers,
                              std::size_t ff, std::size_t max_len, std::size_t C) {
  const std::size_t embeddings = V * d + max_len * d;
  const std::size_t attention = 4 * (d * d + d);
  const std::size_t norms = 2 * (2 * d);
  const std::size_t feed_forward = d * ff + ff + ff * d + d;
  const std::size_t head = 2 * d + d * C + C;
  return embeddings + layers * (attention + norms + feed_forward) + head;
}

std::vector<nc::LabeledUtterance> synthetic_corpus(std::size_t count, std::uint64_t seed) {
  nc::NoiseConfig noise;
  noise.lowercase_probability = 0.3;
  noise.dysfluency_rate = 0.1;
  const auto split = nc::generate_corpus(nt::bundled_gazetteers(), nt::bundled_templates(),
                                         count, noise, seed);
  return split.train;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = tiny_config();
  CHECK_NOTHROW(c.validate());
  c.d_model = 64;
  c.n_heads = 3;
  CHECK_THROWS_AS(c.validate(), nerdistill::ConfigError);
  CHECK_THROWS_AS(ng::init_model(c, synthetic_vocab(10)), nerdistill::ConfigError);
  c = tiny_config();
  c.n_classes = 5;
  CHECK_THROWS_AS(c.validate(), nerdistill::ConfigError);
  c = tiny_config();
  CHECK_THROWS_AS(ng::init_model(c, synthetic_vocab(11)), nerdistill::ConfigError);

  const auto t = ng::TrainConfig::teacher_defaults();
  CHECK(t.batch_size == 2);
  CHECK(t.learning_rate == 5e-5);
  CHECK(t.epochs == 3);
  const auto s = ng::TrainConfig::student_defaults();
  CHECK(s.batch_size == 32);
  CHECK(s.learning_rate == 5e-5);
  CHECK(s.epochs == 5);
}

TEST_CASE("param_count matches closed form") {
  const auto c = tiny_config();
  const auto model = ng::init_model(c, synthetic_vocab(10));
  CHECK(ng::param_count(model) == closed_form_count(10, 8, 1, 16, 6, 7));
  CHECK(ng::param_count(c) == closed_form_count(10, 8, 1, 16, 6, 7));
  const auto teacher = ng::TaggerConfig::teacher_preset(1500);
  CHECK(ng::param_count(teacher) == closed_form_count(1500, 128, 4, 512, 64, 7));
}

TEST_CASE("teacher/student presets keep a 6-9x size ratio") {
  for (int vocab : {1000, 1500, 2000, 2500}) {
    const double ratio =
        static_cast<double>(ng::param_count(ng::TaggerConfig::teacher_preset(vocab))) /
        static_cast<double>(ng::param_count(ng::TaggerConfig::student_preset(vocab)));
    CAPTURE(vocab);
    CHECK(ratio >= 6.0);
    CHECK(ratio <= 9.0);
  }
}

TEST_CASE("init is deterministic") {
  const auto c = tiny_config();
  const auto a = ng::init_model(c, synthetic_vocab(10));
  const auto b = ng::init_model(c, synthetic_vocab(10));
  CHECK(a == b);
  auto c2 = c;
  c2.seed = 4;
  CHECK_FALSE(a == ng::init_model(c2, synthetic_vocab(10)));
  CHECK(a.all_finite());
}

TEST_CASE("forward shape, determinism and masking") {
  auto c = tiny_config();
  c.dropout_rate = 0.1;
  const auto model = ng::init_model(c, synthetic_vocab(10));
  std::vector<std::vector<std::int32_t>> one = {{4}};
  std::vector<std::vector<std::int32_t>> none(1);
  const auto single = ng::make_batch(one, none, c.max_len);
  const auto logits = ng::forward(model, single, false);
  CHECK(logits.batch == 1);
  CHECK(logits.max_len == 6);
  CHECK(logits.classes == 7);
  CHECK(logits.values.size() == 6 * 7);

  const auto batch = tiny_batch();
  const auto e1 = ng::forward(model, batch, false);
  const auto e2 = ng::forward(model, batch, false);
  CHECK(e1.values == e2.values);

  // Garbage in the padded tail changes nothing.
  auto dirty = batch;
  dirty.token_ids[1 * 6 + 4] = 8;
  dirty.token_ids[1 * 6 + 5] = 2;
  CHECK(ng::forward(model, dirty, false).values == e1.values);

  // Same logits as the unpadded, single-row forward.
  std::vector<std::vector<std::int32_t>> row = {{9, 4, 4}};
  const auto alone = ng::forward(model, ng::make_batch(row, none, 3), false);
  for (int t = 0; t < 3; ++t) {
    for (int k = 0; k < 7; ++k) CHECK(alone.at(0, t, k) == doctest::Approx(e1.at(1, t, k)).epsilon(1e-5));
  }
  for (float v : e1.values) CHECK(std::isfinite(v));

  // Train mode with dropout differs from eval mode and needs an rng.
  nerdistill::Rng rng(1);
  CHECK(ng::forward(model, batch, true, &rng).values != e1.values);
  CHECK_THROWS_AS(ng::forward(model, batch, true), nerdistill::ValidationError);
  CHECK_THROWS_AS(ng::forward(model, ng::make_batch({{{12}}}, none, 6), false),
                  nerdistill::ValidationError);
}

TEST_CASE("cross entropy closed forms") {
  auto batch = tiny_batch();
  ng::Logits<double> zeros{2, 6, 7, std::vector<double>(2 * 6 * 7, 0.0)};
  CHECK(ng::cross_entropy(zeros, batch) == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(std::abs(ng::cross_entropy(zeros, batch) - 1.945910149055313) < 1e-6);

  ng::Logits<double> saturated = zeros;
  for (int n = 0; n < 2; ++n) {
    for (int t = 0; t < batch.lengths[n]; ++t) saturated.at(n, t, batch.target(n, t)) = 1000.0;
  }
  CHECK(ng::cross_entropy(saturated, batch) < 1e-6);

  // High-precision reference values (mpmath, 40 digits).
  std::vector<std::vector<std::int32_t>> ids = {{2}, {3}};
  std::vector<std::vector<std::int32_t>> targets = {{1}, {4}};
  const auto small = ng::make_batch(ids, targets, 1);
  ng::Logits<double> given{2, 1, 7,
                           {1.0, 2.0, 0.5, -1.0, 0.0, 0.3, -0.7,
                            0.25, -1.5, 3.0, 0.0, 2.0, -0.5, 1.0}};
  CHECK(std::abs(ng::cross_entropy(given, small) - 1.105914086585493990) < 1e-9);
  const auto first_only = ng::make_batch(std::vector<std::vector<std::int32_t>>{{2}},
                                         std::vector<std::vector<std::int32_t>>{{1}}, 1);
  ng::Logits<double> first{1, 1, 7, {1.0, 2.0, 0.5, -1.0, 0.0, 0.3, -0.7}};
  CHECK(std::abs(ng::cross_entropy(first, first_only) - 0.7060737659489523339) < 1e-9);

  // Shift invariance per position.
  ng::Logits<double> shifted = given;
  for (int k = 0; k < 7; ++k) {
    shifted.at(0, 0, k) += 17.5;
    shifted.at(1, 0, k) -= 3.25;
  }
  CHECK(std::abs(ng::cross_entropy(shifted, small) - ng::cross_entropy(given, small)) < 1e-12);

  std::vector<std::vector<std::int32_t>> no_targets(2);
  const auto ignored = ng::make_batch(ids, no_targets, 1);
  CHECK_THROWS_AS(ng::cross_entropy(given, ignored), nerdistill::ValidationError);
}

TEST_CASE("analytic gradient matches central finite differences") {
  auto model = ng::init_model<double>(tiny_config(), synthetic_vocab(10));
  const auto batch = tiny_batch();
  const auto grad = ng::ForwardPass<double>(model, batch, false).backward();
  auto params = model.parameters();
  REQUIRE(grad.size() == params.size());
  const double h = 1e-4;
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = ng::cross_entropy(ng::forward(model, batch, false), batch);
    params[i] = saved - h;
    const double down = ng::cross_entropy(ng::forward(model, batch, false), batch);
    params[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
    if (scale < 1e-7) {
      CHECK(std::abs(numeric - grad[i]) < 1e-9);
    } else {
      worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
    }
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("gradient with dropout matches finite differences for fixed masks") {
  auto c = tiny_config();
  c.dropout_rate = 0.2;
  auto model = ng::init_model<double>(c, synthetic_vocab(10));
  const auto batch = tiny_batch();
  auto run = [&](bool with_grad, ng::ParamVector<double>* g) {
    nerdistill::Rng rng(99);
    ng::ForwardPass<double> pass(model, batch, true, &rng);
    if (with_grad) *g = pass.backward();
    return ng::cross_entropy(pass.logits(), batch);
  };
  ng::ParamVector<double> grad;
  run(true, &grad);
  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); i += 7) {
    const double saved = params[i];
    params[i] = saved + 1e-4;
    const double up = run(false, nullptr);
    params[i] = saved - 1e-4;
    const double down = run(false, nullptr);
    params[i] = saved;
    const double numeric = (up - down) / 2e-4;
    CHECK(numeric == doctest::Approx(grad[i]).epsilon(1e-3).scale(1e-6));
  }
}

TEST_CASE("optimizer step behaviour") {
  auto model = ng::init_model(tiny_config(), synthetic_vocab(10));
  const auto batch = tiny_batch();
  auto tc = ng::TrainConfig::student_defaults();
  tc.learning_rate = 0.0;
  const auto before = model;
  ng::AdamOptimizer zero(model.parameters().size(), tc);
  zero.step(model.parameters(), ng::ForwardPass<float>(model, batch, false).backward());
  CHECK(model == before);

  int decreased = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cfg = tiny_config();
    cfg.seed = seed;
    auto m = ng::init_model(cfg, synthetic_vocab(10));
    const double l0 = ng::cross_entropy(ng::forward(m, batch, false), batch);
    tc.learning_rate = 1e-3;
    ng::AdamOptimizer adam(m.parameters().size(), tc);
    adam.step(m.parameters(), ng::ForwardPass<float>(m, batch, false).backward());
    const double l1 = ng::cross_entropy(ng::forward(m, batch, false), batch);
    decreased += l1 < l0 ? 1 : 0;
  }
  CHECK(decreased == 20);
}

TEST_CASE("train: epochs=0, determinism, errors") {
  const auto data = synthetic_corpus(60, 2);
  const auto vocab = nc::Vocabulary::build(data);
  auto cfg = ng::TaggerConfig::student_preset(static_cast<int>(vocab.size()));
  auto tc = ng::TrainConfig::student_defaults();
  tc.epochs = 0;
  auto m0 = ng::init_model(cfg, vocab);
  const auto untouched = m0;
  const auto r0 = ng::train(m0, data, tc);
  CHECK(m0 == untouched);
  CHECK(r0.epoch_losses.empty());

  tc.epochs = 2;
  tc.learning_rate = 1e-3;
  auto a = ng::init_model(cfg, vocab);
  auto b = ng::init_model(cfg, vocab);
  const auto ra = ng::train(a, data, tc);
  const auto rb = ng::train(b, data, tc);
  CHECK(a == b);
  CHECK(ra.epoch_losses == rb.epoch_losses);
  CHECK(ra.epoch_losses.size() == 2);
  CHECK(a.all_finite());

  CHECK_THROWS_AS(ng::train(a, {}, tc), nerdistill::ValidationError);
  auto untagged = nc::strip_tags(data);
  CHECK_THROWS_AS(ng::train(a, untagged, tc), nerdistill::ValidationError);
}

TEST_CASE("train: teacher preset fits a 200-utterance set") {
  const auto data = synthetic_corpus(284, 8);  // 200 train utterances
  REQUIRE(data.size() == 200);
  const auto vocab = nc::Vocabulary::build(data);
  auto model = ng::init_model(ng::TaggerConfig::teacher_preset(static_cast<int>(vocab.size())), vocab);
  auto tc = ng::TrainConfig::teacher_defaults();
  tc.learning_rate = ng::kDeskLearningRate;
  const auto result = ng::train(model, data, tc);
  MESSAGE("epoch losses: " << result.epoch_losses.front() << " -> " << result.epoch_losses.back());
  const double acc = ng::token_accuracy(model, data);
  MESSAGE("training token accuracy: " << acc);
  CHECK(acc > 0.95);
}

TEST_CASE("predict: forced class, tie-break, truncation, scaling") {
  auto c = tiny_config();
  auto model = ng::init_model(c, synthetic_vocab(10));
  auto w = model.tensor(model.layout().classifier());
  std::fill(w.begin(), w.end(), 0.0f);
  auto b = model.tensor(model.layout().classifier_bias());
  std::fill(b.begin(), b.end(), 0.0f);
  b[0] = 5.0f;
  nc::LabeledUtterance u{"u", {"t2", "t3", "zzz", "t4"}, std::nullopt};
  CHECK(ng::predict(model, u) == std::vector<nc::Tag>(4, nc::Tag::outside()));

  b[0] = 0.0f;
  b[2] = 1.0f;
  b[4] = 1.0f;
  for (auto tag : ng::predict(model, u)) CHECK(tag.index() == 2);
  const std::vector<float> tie = {0.1f, 0.0f, 0.7f, 0.2f, 0.7f, 0.0f, 0.0f};
  CHECK(ng::argmax_lowest(std::span<const float>(tie)) == 2);

  // Beyond max_len everything is O.
  b[0] = 0.0f;
  b[2] = 0.0f;
  b[4] = 0.0f;
  b[5] = 3.0f;
  nc::LabeledUtterance longer{"l", std::vector<std::string>(9, "t5"), std::nullopt};
  const auto tags = ng::predict(model, longer);
  REQUIRE(tags.size() == 9);
  for (int i = 0; i < 6; ++i) CHECK(tags[i] == nc::Tag::begin(nc::EntityType::kLocation));
  for (int i = 6; i < 9; ++i) CHECK(tags[i] == nc::Tag::outside());
}

TEST_CASE("predict: random models give decodable, scale-invariant output (property)") {
  nerdistill::Rng rng(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = tiny_config();
    c.seed = seed;
    auto model = ng::init_model(c, synthetic_vocab(10));
    for (float& v : model.tensor(model.layout().classifier())) v *= 40.0f;
    nc::LabeledUtterance u{"u", {}, std::nullopt};
    const std::size_t len = 1 + nerdistill::uniform_index(rng, 8);
    for (std::size_t i = 0; i < len; ++i) {
      u.tokens.push_back("t" + std::to_string(2 + nerdistill::uniform_index(rng, 8)));
    }
    const auto tags = ng::predict(model, u);
    REQUIRE(tags.size() == len);
    const auto spans = nc::bio_decode(tags);
    CHECK(nt::to_ref(spans) == nt::reference_decode(nt::tag_names(tags)));
    for (const auto& s : spans) CHECK(s.end <= len);

    // Scaling the head's weights and bias scales every logit.
    auto scaled = model;
    for (float& v : scaled.tensor(scaled.layout().classifier())) v *= 4.0f;
    for (float& v : scaled.tensor(scaled.layout().classifier_bias())) v *= 4.0f;
    CHECK(ng::predict(scaled, u) == tags);
  }
}

TEST_CASE("checkpoint round trip and corruption") {
  const auto dir = std::filesystem::temp_directory_path() / "nerdistill_tagger_test";
  std::filesystem::create_directories(dir);
  auto model = ng::init_model(tiny_config(), synthetic_vocab(10));
  nlohmann::ordered_json prov = {{"stage", "test"}, {"seed", 3}};
  ng::save(model, dir / "m.ckpt", prov);
  const auto ck = ng::load_checkpoint(dir / "m.ckpt");
  CHECK(ck.model == model);
  CHECK(ck.provenance == prov);
  CHECK(ng::model_id(ck.model) == ng::model_id(model));

  std::string bytes = ng::serialize(model);
  const auto flip = [&](std::size_t at) {
    std::string copy = bytes;
    copy[at] = static_cast<char>(copy[at] ^ 0x5a);
    return copy;
  };
  CHECK_THROWS_AS(ng::deserialize(flip(0)), nerdistill::FormatError);   // magic
  CHECK_THROWS_AS(ng::deserialize(flip(8)), nerdistill::FormatError);   // version
  CHECK_THROWS_AS(ng::deserialize(flip(20)), nerdistill::FormatError);  // header json
  CHECK_THROWS_AS(ng::deserialize(flip(bytes.size() - 40)), nerdistill::FormatError);
  CHECK_THROWS_AS(ng::deserialize(bytes.substr(0, bytes.size() / 2)), nerdistill::FormatError);
  CHECK_THROWS_AS(ng::deserialize(bytes.substr(0, 6)), nerdistill::FormatError);
  try {
    ng::deserialize(flip(8));
  } catch (const nerdistill::FormatError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
  CHECK_THROWS_AS(ng::load(dir / "absent.ckpt"), nerdistill::IoError);
}
