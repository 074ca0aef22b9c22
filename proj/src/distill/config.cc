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

#include "nerdistill/distill/config.h"

#include <optional>
#include <set>
#include <string>

#include "nerdistill/error.h"
#include "nerdistill/rng.h"

namespace nerdistill::distill {
namespace {

using Json = nlohmann::ordered_json;

// Reads an object, remembering which keys were consumed so leftovers can
// be reported as unknown.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config key '" + where() + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("invalid value for config key '" + join(key) + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  // Child object, or an empty one when absent.
  Reader child(const char* key) {
    seen_.insert(key);
    static const Json kEmpty = Json::object();
    return Reader(j_.contains(key) ? j_.at(key) : kEmpty, join(key));
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("unknown config key '" + join(item.key()) + "'");
      }
    }
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_noise(Reader r, corpus::NoiseConfig& n) {
  r.get("strip_punctuation", n.strip_punctuation);
  r.get("lowercase_probability", n.lowercase_probability);
  r.get("dysfluency_rate", n.dysfluency_rate);
  r.get("filler_lexicon", n.filler_lexicon);
  r.get("repeat_rate", n.repeat_rate);
  r.get("seed", n.rng_seed);
  r.finish();
}

void read_model(Reader r, tagger::TaggerConfig& c) {
  r.get("d_model", c.d_model);
  r.get("n_layers", c.n_layers);
  r.get("n_heads", c.n_heads);
  r.get("d_ff", c.d_ff);
  r.get("max_len", c.max_len);
  r.get("dropout_rate", c.dropout_rate);
  r.get("seed", c.seed);
  r.finish();
}

void read_train(Reader r, tagger::TrainConfig& c) {
  r.get("batch_size", c.batch_size);
  r.get("learning_rate", c.learning_rate);
  r.get("epochs", c.epochs);
  r.get("beta1", c.beta1);
  r.get("beta2", c.beta2);
  r.get("epsilon", c.epsilon);
  r.get("seed", c.seed);
  r.finish();
}

Json noise_json(const corpus::NoiseConfig& n) {
  return {{"strip_punctuation", n.strip_punctuation},
          {"lowercase_probability", n.lowercase_probability},
          {"dysfluency_rate", n.dysfluency_rate},
          {"filler_lexicon", n.filler_lexicon},
          {"repeat_rate", n.repeat_rate},
          {"seed", n.rng_seed}};
}

Json model_json(const tagger::TaggerConfig& c) {
  Json j = c;
  j.erase("vocab_size");
  j.erase("n_classes");
  return j;
}

// Prefixes validate() messages from nested configs with the key path.
template <typename F>
void check(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (corpus.count < 10) throw ConfigError("corpus.count must be at least 10");
  if (!(corpus.entity_fraction >= 0.0 && corpus.entity_fraction <= 1.0)) {
    throw ConfigError("corpus.entity_fraction must be in [0, 1]");
  }
  check("corpus.noise", [&] { corpus.noise.validate(); });
  if (!(pool.ratio > 0.0)) throw ConfigError("pool.ratio must be positive");
  if (!(pool.entity_fraction >= 0.0 && pool.entity_fraction <= 1.0)) {
    throw ConfigError("pool.entity_fraction must be in [0, 1]");
  }
  check("pool.noise", [&] { pool.noise.validate(); });
  if (pool.workers < 1) throw ConfigError("pool.workers must be >= 1");
  check("filter", [&] { filter.validate(); });
  if (vocab_min_count < 1) throw ConfigError("vocab.min_count must be >= 1");
  // vocab_size is filled in later; validate the shape with a placeholder.
  auto shape = [](tagger::TaggerConfig c) {
    c.vocab_size = 2;
    c.validate();
  };
  check("teacher.model", [&] { shape(teacher); });
  check("teacher.train", [&] { teacher_train.validate(); });
  check("student.model", [&] { shape(student); });
  check("student.stage1", [&] { stage1.validate(); });
  check("student.stage2", [&] { stage2.validate(); });
  if (bench.iterations < 30) throw ConfigError("bench.iterations must be >= 30");
  if (bench.warmup < 0) throw ConfigError("bench.warmup must be >= 0");
}

PipelineConfig pipeline_config_from_json(const Json& j, std::optional<std::uint64_t> seed_override) {
  PipelineConfig c;
  Reader root(j, "");
  root.get("seed", c.seed);
  if (seed_override) c.seed = *seed_override;
  c.corpus.seed = mix_seed(c.seed, 1);
  c.corpus.noise.rng_seed = mix_seed(c.seed, 2);
  c.pool.seed = mix_seed(c.seed, 3);
  c.pool.noise.rng_seed = mix_seed(c.seed, 4);
  c.teacher.seed = mix_seed(c.seed, 5);
  c.teacher_train.seed = mix_seed(c.seed, 6);
  c.student.seed = mix_seed(c.seed, 7);
  c.stage1.seed = mix_seed(c.seed, 8);
  c.stage2.seed = mix_seed(c.seed, 9);

  {
    Reader r = root.child("corpus");
    r.get("count", c.corpus.count);
    r.get("entity_fraction", c.corpus.entity_fraction);
    r.get("seed", c.corpus.seed);
    read_noise(r.child("noise"), c.corpus.noise);
    r.finish();
  }
  {
    Reader r = root.child("pool");
    r.get("ratio", c.pool.ratio);
    r.get("entity_fraction", c.pool.entity_fraction);
    r.get("seed", c.pool.seed);
    r.get("workers", c.pool.workers);
    read_noise(r.child("noise"), c.pool.noise);
    r.finish();
  }
  {
    Reader r = root.child("filter");
    r.get("casing", c.filter.use_casing);
    r.get("min_hits", c.filter.min_hits);
    r.finish();
  }
  {
    Reader r = root.child("vocab");
    r.get("min_count", c.vocab_min_count);
    r.finish();
  }
  {
    Reader r = root.child("teacher");
    read_model(r.child("model"), c.teacher);
    read_train(r.child("train"), c.teacher_train);
    r.finish();
  }
  {
    Reader r = root.child("student");
    read_model(r.child("model"), c.student);
    read_train(r.child("stage1"), c.stage1);
    read_train(r.child("stage2"), c.stage2);
    r.finish();
  }
  {
    Reader r = root.child("bench");
    r.get("enabled", c.bench.enabled);
    r.get("warmup", c.bench.warmup);
    r.get("iterations", c.bench.iterations);
    r.finish();
  }
  root.finish();
  c.validate();
  return c;
}

Json to_json(const PipelineConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["corpus"] = {{"count", c.corpus.count},
                 {"entity_fraction", c.corpus.entity_fraction},
                 {"seed", c.corpus.seed},
                 {"noise", noise_json(c.corpus.noise)}};
  j["pool"] = {{"ratio", c.pool.ratio},
               {"entity_fraction", c.pool.entity_fraction},
               {"seed", c.pool.seed},
               {"workers", c.pool.workers},
               {"noise", noise_json(c.pool.noise)}};
  j["filter"] = {{"casing", c.filter.use_casing}, {"min_hits", c.filter.min_hits}};
  j["vocab"] = {{"min_count", c.vocab_min_count}};
  j["teacher"] = {{"model", model_json(c.teacher)}, {"train", Json(c.teacher_train)}};
  j["student"] = {{"model", model_json(c.student)},
                  {"stage1", Json(c.stage1)},
                  {"stage2", Json(c.stage2)}};
  j["bench"] = {{"enabled", c.bench.enabled},
                {"warmup", c.bench.warmup},
                {"iterations", c.bench.iterations}};
  return j;
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return to_json(a) == to_json(b);
}

}  // namespace nerdistill::distill
