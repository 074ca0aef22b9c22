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

#include "nerdistill/tagger/config.h"

#include <string>

#include "nerdistill/corpus/tags.h"
#include "nerdistill/error.h"

namespace nerdistill::tagger {
namespace {

void require_positive(const char* name, double value) {
  if (!(value > 0)) {
    throw ConfigError(std::string(name) + " must be positive, got " +
                      std::to_string(value));
  }
}

}  // namespace

void TaggerConfig::validate() const {
  require_positive("vocab_size", vocab_size);
  require_positive("d_model", d_model);
  require_positive("n_layers", n_layers);
  require_positive("n_heads", n_heads);
  require_positive("d_ff", d_ff);
  require_positive("max_len", max_len);
  if (d_model % n_heads != 0) {
    throw ConfigError("d_model (" + std::to_string(d_model) +
                      ") is not divisible by n_heads (" +
                      std::to_string(n_heads) + ")");
  }
  if (n_classes != corpus::Tag::kNumClasses) {
    throw ConfigError("n_classes must be " +
                      std::to_string(corpus::Tag::kNumClasses));
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must be in [0, 1)");
  }
}

TaggerConfig TaggerConfig::teacher_preset(int vocab_size, int max_len) {
  TaggerConfig c;
  c.vocab_size = vocab_size;
  c.d_model = 128;
  c.n_layers = 4;
  c.n_heads = 4;
  c.d_ff = 512;
  c.max_len = max_len;
  return c;
}

TaggerConfig TaggerConfig::student_preset(int vocab_size, int max_len) {
  TaggerConfig c;
  c.vocab_size = vocab_size;
  c.d_model = 48;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 192;
  c.max_len = max_len;
  return c;
}

void TrainConfig::validate() const {
  require_positive("batch_size", batch_size);
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must be in [0, 1)");
  }
  require_positive("epsilon", epsilon);
}

TrainConfig TrainConfig::teacher_defaults() {
  TrainConfig c;
  c.batch_size = 2;
  c.learning_rate = 5e-5;
  c.epochs = 3;
  return c;
}

TrainConfig TrainConfig::student_defaults() {
  TrainConfig c;
  c.batch_size = 32;
  c.learning_rate = 5e-5;
  c.epochs = 5;
  return c;
}

void to_json(nlohmann::ordered_json& j, const TaggerConfig& c) {
  j = nlohmann::ordered_json{{"vocab_size", c.vocab_size},
                             {"d_model", c.d_model},
                             {"n_layers", c.n_layers},
                             {"n_heads", c.n_heads},
                             {"d_ff", c.d_ff},
                             {"max_len", c.max_len},
                             {"n_classes", c.n_classes},
                             {"dropout_rate", c.dropout_rate},
                             {"seed", c.seed}};
}

void from_json(const nlohmann::ordered_json& j, TaggerConfig& c) {
  j.at("vocab_size").get_to(c.vocab_size);
  j.at("d_model").get_to(c.d_model);
  j.at("n_layers").get_to(c.n_layers);
  j.at("n_heads").get_to(c.n_heads);
  j.at("d_ff").get_to(c.d_ff);
  j.at("max_len").get_to(c.max_len);
  j.at("n_classes").get_to(c.n_classes);
  j.at("dropout_rate").get_to(c.dropout_rate);
  j.at("seed").get_to(c.seed);
}

void to_json(nlohmann::ordered_json& j, const TrainConfig& c) {
  j = nlohmann::ordered_json{{"batch_size", c.batch_size},
                             {"learning_rate", c.learning_rate},
                             {"epochs", c.epochs},
                             {"beta1", c.beta1},
                             {"beta2", c.beta2},
                             {"epsilon", c.epsilon},
                             {"seed", c.seed}};
}

void from_json(const nlohmann::ordered_json& j, TrainConfig& c) {
  j.at("batch_size").get_to(c.batch_size);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("epochs").get_to(c.epochs);
  j.at("beta1").get_to(c.beta1);
  j.at("beta2").get_to(c.beta2);
  j.at("epsilon").get_to(c.epsilon);
  j.at("seed").get_to(c.seed);
}

}  // namespace nerdistill::tagger
