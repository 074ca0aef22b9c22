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

#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nerdistill/corpus/generator.h"
#include "nerdistill/corpus/stats.h"
#include "nerdistill/distill/config.h"
#include "nerdistill/distill/filter.h"
#include "nerdistill/distill/pipeline.h"
#include "nerdistill/distill/pseudo_label.h"
#include "nerdistill/error.h"
#include "nerdistill/rng.h"
#include "nerdistill/tagger/checkpoint.h"
#include "nerdistill/tagger/model.h"
#include "test_util.h"

namespace nc = nerdistill::corpus;
namespace nd = nerdistill::distill;
namespace ng = nerdistill::tagger;
namespace nt = nerdistill::testing;
using nerdistill::ConfigError;
using nerdistill::StageError;
using nerdistill::ValidationError;
using Json = nlohmann::ordered_json;

namespace {

nc::LabeledUtterance utt(std::string id, const std::string& text) {
  nc::LabeledUtterance u;
  u.id = std::move(id);
  std::istringstream in(text);
  for (std::string t; in >> t;) u.tokens.push_back(t);
  return u;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string t; in >> t;) out.push_back(lower(t));
  return out;
}

// Brute force: a position is a hit if some phrase matches a token window
// covering it, or the casing rule flags it.
std::size_t reference_hits(const nc::LabeledUtterance& u,
                           const std::vector<std::string>& phrases, bool casing) {
  std::vector<bool> hit(u.tokens.size(), false);
  for (const auto& p : phrases) {
    const auto w = words(p);
    if (w.empty() || w.size() > u.tokens.size()) continue;
    for (std::size_t s = 0; s + w.size() <= u.tokens.size(); ++s) {
      bool ok = true;
      for (std::size_t k = 0; k < w.size() && ok; ++k) ok = lower(u.tokens[s + k]) == w[k];
      if (ok) std::fill(hit.begin() + s, hit.begin() + s + w.size(), true);
    }
  }
  if (casing) {
    for (std::size_t i = 0; i < u.tokens.size(); ++i) {
      if (u.tokens[i] == "I") continue;
      const std::string& t = u.tokens[i];
      for (std::size_t c = (i == 0 ? 1 : 0); c < t.size(); ++c) {
        if (std::isupper(static_cast<unsigned char>(t[c]))) hit[i] = true;
      }
    }
  }
  return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
}

nc::Gazetteers gazetteer_of(std::vector<std::string> person) {
  nc::Gazetteers g;
  g[nc::EntityType::kPerson] = std::move(person);
  return g;
}

const nc::DatasetSplit& tiny_split() {
  static const nc::DatasetSplit split =
      nc::generate_corpus(nt::bundled_gazetteers(), nt::bundled_templates(), 120, {}, 5);
  return split;
}

ng::TaggerConfig tiny_tagger(int d = 16) {
  ng::TaggerConfig c;
  c.d_model = d;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 2 * d;
  c.max_len = 32;
  c.dropout_rate = 0.0;
  return c;
}

ng::TrainConfig tiny_train(int epochs = 2) {
  ng::TrainConfig c;
  c.batch_size = 8;
  c.learning_rate = 1e-3;
  c.epochs = epochs;
  return c;
}

// A teacher good enough to emit some entities.
const ng::TaggerModel& tiny_teacher() {
  static const ng::TaggerModel m = [] {
    const auto split =
        nc::generate_corpus(nt::bundled_gazetteers(), nt::bundled_templates(), 400, {}, 99);
    return nd::finetune_teacher(split, tiny_tagger(32), tiny_train(8)).model;
  }();
  return m;
}

ng::TaggerModel all_outside_teacher() {
  auto m = nd::init_for(tiny_tagger(), tiny_split().train, 1);
  auto bias = m.tensor(m.layout().classifier_bias());
  bias[0] = 1e4f;
  return m;
}

std::vector<nc::LabeledUtterance> unlabeled_pool(std::size_t n, std::uint64_t seed) {
  auto raw = nc::generate_pool(nt::bundled_gazetteers(), nt::bundled_templates(), n, {}, seed,
                               0.5, tiny_split());
  return nc::strip_tags(raw);
}

nd::PipelineConfig tiny_pipeline() {
  nd::PipelineConfig c;
  c.seed = 11;
  c.corpus.count = 120;
  c.pool.ratio = 2.0;
  c.teacher = tiny_tagger(16);
  c.teacher_train = tiny_train(2);
  c.student = tiny_tagger(8);
  c.stage1 = tiny_train(1);
  c.stage2 = tiny_train(1);
  c.bench.enabled = false;
  return nd::pipeline_config_from_json(nd::to_json(c));
}

nd::PipelineInputs bundled_inputs() {
  nd::PipelineInputs in;
  in.gazetteers = nt::bundled_gazetteers();
  in.templates = nt::bundled_templates();
  const auto dir = nt::data_dir() / "filter";
  in.filter_gazetteers = nc::read_gazetteers({{nc::EntityType::kPerson, dir / "person.txt"},
                                              {nc::EntityType::kProdOrg, dir / "prodorg.txt"},
                                              {nc::EntityType::kLocation, dir / "location.txt"}});
  return in;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("filter: gazetteer and casing examples") {
  nd::EntityLikelihoodFilter f(gazetteer_of({"acme"}), {});
  CHECK(f.accepts(utt("a", "i want to call acme about the order")));
  CHECK_FALSE(f.accepts(utt("b", "yeah okay thanks bye")));
  // Multi-token phrases need every token, in order.
  nd::EntityLikelihoodFilter g(gazetteer_of({"Acme Corp"}), {false, 1});
  CHECK(g.hits(utt("c", "from acme corp today")) == 2);
  CHECK(g.hits(utt("d", "from acme today")) == 0);
  CHECK(g.hits(utt("e", "corp acme")) == 0);
}

TEST_CASE("filter: casing candidates") {
  const std::vector<std::string> t{"Hello", "I", "have", "an", "iPhone", "from", "Denver"};
  CHECK_FALSE(nd::EntityLikelihoodFilter::casing_candidate(t, 0));
  CHECK_FALSE(nd::EntityLikelihoodFilter::casing_candidate(t, 1));
  CHECK_FALSE(nd::EntityLikelihoodFilter::casing_candidate(t, 2));
  CHECK(nd::EntityLikelihoodFilter::casing_candidate(t, 4));
  CHECK(nd::EntityLikelihoodFilter::casing_candidate(t, 6));
  const std::vector<std::string> mc{"McKay", "called"};
  CHECK(nd::EntityLikelihoodFilter::casing_candidate(mc, 0));

  nd::EntityLikelihoodFilter on(gazetteer_of({}), {true, 1});
  nd::EntityLikelihoodFilter off(gazetteer_of({}), {false, 1});
  const auto u = utt("x", "so I talked to Maria");
  CHECK(on.accepts(u));
  CHECK_FALSE(off.accepts(u));
}

TEST_CASE("filter: hits match a brute-force reference") {
  const auto gz = nt::bundled_gazetteers();
  std::vector<std::string> phrases;
  for (const auto& [type, list] : gz) phrases.insert(phrases.end(), list.begin(), list.end());
  const auto raw = nc::generate_pool(gz, nt::bundled_templates(), 400,
                                     {.lowercase_probability = 0.5}, 3, 0.5, {});
  for (bool casing : {false, true}) {
    nd::EntityLikelihoodFilter f(gz, {casing, 1});
    for (const auto& u : raw) {
      REQUIRE(f.hits(u) == reference_hits(u, phrases, casing));
    }
  }
}

TEST_CASE("filter: config validation") {
  CHECK_THROWS_AS(nd::EntityLikelihoodFilter(gazetteer_of({"x"}), {true, 0}), ConfigError);
}

TEST_CASE("property: adding gazetteer entries never shrinks the accepted pool") {
  const auto gz = nt::bundled_gazetteers();
  std::vector<std::pair<nc::EntityType, std::string>> all;
  for (const auto& [type, list] : gz) {
    for (const auto& p : list) all.emplace_back(type, p);
  }
  const auto raw = nc::generate_pool(gz, nt::bundled_templates(), 300,
                                     {.lowercase_probability = 1.0}, 9, 0.5, {});
  nerdistill::Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    auto order = all;
    nerdistill::shuffle(order.begin(), order.end(), rng);
    nd::EntityLikelihoodFilter f({}, {trial % 2 == 0, 1 + trial % 3});
    std::set<std::string> accepted;
    for (std::size_t i = 0; i < order.size(); i += 25) {
      for (std::size_t k = i; k < std::min(order.size(), i + 25); ++k) {
        f.add_entry(order[k].first, order[k].second);
      }
      std::set<std::string> now;
      for (const auto& u : nd::sample_pool(raw, f).accepted) now.insert(u.id);
      REQUIRE(std::includes(now.begin(), now.end(), accepted.begin(), accepted.end()));
      accepted = std::move(now);
    }
  }
}

TEST_CASE("sample_pool: order preserving subset and rate") {
  const auto raw = unlabeled_pool(200, 21);
  nd::EntityLikelihoodFilter f(bundled_inputs().filter_gazetteers, {});
  const auto s = nd::sample_pool(raw, f);
  CHECK(s.raw_count == raw.size());
  std::size_t expect = 0;
  std::size_t j = 0;
  for (const auto& u : raw) {
    if (!f.accepts(u)) continue;
    ++expect;
    REQUIRE(j < s.accepted.size());
    CHECK(s.accepted[j++] == u);
  }
  CHECK(s.accepted.size() == expect);
  CHECK(s.acceptance_rate() == doctest::Approx(double(expect) / raw.size()));
  CHECK(nd::sample_pool({}, f).acceptance_rate() == 0.0);
}

TEST_CASE("pseudo_label: one utterance") {
  const auto pool = unlabeled_pool(1, 2);
  const auto set = nd::pseudo_label(tiny_teacher(), pool);
  REQUIRE(set.utterances.size() == 1);
  REQUIRE(set.utterances[0].tags.has_value());
  CHECK(set.utterances[0].tags->size() == set.utterances[0].tokens.size());
  CHECK(set.utterances[0].tokens == pool[0].tokens);
  CHECK(set.teacher_id == ng::model_id(tiny_teacher()));
}

TEST_CASE("pseudo_label: all-O teacher gives no positives") {
  const auto teacher = all_outside_teacher();
  const auto set = nd::pseudo_label(teacher, unlabeled_pool(30, 4));
  CHECK(set.stats.total == 30);
  CHECK(set.stats.positive == 0);
  CHECK(set.stats.negative == 30);
  CHECK(set.utterances.size() == 30);  // negatives are kept
}

TEST_CASE("pseudo_label: stats match a hand count of the printed predictions") {
  const auto pool = unlabeled_pool(10, 6);
  const auto set = nd::pseudo_label(tiny_teacher(), pool);
  REQUIRE(set.utterances.size() == 10);
  std::size_t positive = 0;
  std::array<std::size_t, 3> per_type{};
  for (const auto& u : set.utterances) {
    // Read the tag strings back as text, as one would from the printout.
    std::set<std::string> types;
    for (auto t : *u.tags) {
      const std::string name(t.name());
      if (name != "O") types.insert(name.substr(2));
    }
    if (!types.empty()) ++positive;
    per_type[0] += types.count("PERSON");
    per_type[1] += types.count("PRODORG");
    per_type[2] += types.count("LOCATION");
  }
  CHECK(positive > 0);  // otherwise the count is vacuous
  CHECK(set.stats.total == 10);
  CHECK(set.stats.positive == positive);
  CHECK(set.stats.negative == 10 - positive);
  CHECK(set.stats.count(nc::EntityType::kPerson) == per_type[0]);
  CHECK(set.stats.count(nc::EntityType::kProdOrg) == per_type[1]);
  CHECK(set.stats.count(nc::EntityType::kLocation) == per_type[2]);
}

TEST_CASE("pseudo_label: worker count does not change the output") {
  const auto pool = unlabeled_pool(37, 8);
  const auto one = nd::pseudo_label(tiny_teacher(), pool, 1);
  for (int w : {2, 3, 8, 64}) {
    const auto many = nd::pseudo_label(tiny_teacher(), pool, w);
    CHECK(many.utterances == one.utterances);
    CHECK(many.stats == one.stats);
  }
  CHECK_THROWS_AS(nd::pseudo_label(tiny_teacher(), pool, 0), ConfigError);
  CHECK_THROWS_AS(nd::pseudo_label(tiny_teacher(), {}), ValidationError);
}

TEST_CASE("property: pseudo labels are the teacher's hard labels") {
  const auto pool = unlabeled_pool(50, 10);
  auto set = nd::pseudo_label(tiny_teacher(), pool);
  CHECK(nd::hard_labels_consistent(tiny_teacher(), set));
  for (const auto& u : set.utterances) {
    CHECK(nc::is_bio_valid(*u.tags));
    CHECK(nc::bio_decode(*u.tags) == nc::bio_decode(ng::predict(tiny_teacher(), u)));
  }
  // Flip one tag.
  auto& tags = *set.utterances[3].tags;
  tags[0] = tags[0].is_outside() ? nc::Tag::begin(nc::EntityType::kPerson) : nc::Tag::outside();
  CHECK_FALSE(nd::hard_labels_consistent(tiny_teacher(), set));
}

TEST_CASE("finetune_teacher: determinism and errors") {
  const auto a = nd::finetune_teacher(tiny_split(), tiny_tagger(), tiny_train(1));
  const auto b = nd::finetune_teacher(tiny_split(), tiny_tagger(), tiny_train(1));
  CHECK(a.model == b.model);
  CHECK(a.dev.micro == b.dev.micro);
  CHECK(a.dev.micro == nd::evaluate(a.model, tiny_split().dev).micro);
  nc::DatasetSplit empty;
  empty.dev = tiny_split().dev;
  CHECK_THROWS_AS(nd::finetune_teacher(empty, tiny_tagger(), tiny_train(1)), ValidationError);
}

TEST_CASE("two-stage student: skipped stage 2 is the stage-1 model") {
  const auto pseudo = nd::pseudo_label(tiny_teacher(), unlabeled_pool(60, 12));
  auto tc2 = tiny_train(0);
  const auto r = nd::train_student_two_stage(pseudo, tiny_split(), tiny_tagger(8), tiny_train(1), tc2);
  CHECK(r.model == r.stage1_model);
  CHECK(r.stage2.steps == 0);
  CHECK(r.stage1.steps > 0);

  const auto full = nd::train_student_two_stage(pseudo, tiny_split(), tiny_tagger(8), tiny_train(1),
                                                tiny_train(1));
  const auto again = nd::train_student_two_stage(pseudo, tiny_split(), tiny_tagger(8),
                                                 tiny_train(1), tiny_train(1));
  CHECK(full.stage1_model == r.stage1_model);
  CHECK(full.model == again.model);
  CHECK_FALSE(full.model == full.stage1_model);
}

TEST_CASE("two-stage student: stage 2 reads gold train only") {
  const auto pseudo = nd::pseudo_label(tiny_teacher(), unlabeled_pool(40, 14));
  const auto base = nd::train_student_two_stage(pseudo, tiny_split(), tiny_tagger(8),
                                                tiny_train(1), tiny_train(1));
  // Changing dev and test must not change the trained model.
  auto other = tiny_split();
  other.dev.resize(3);
  other.test.resize(2);
  const auto r = nd::train_student_two_stage(pseudo, other, tiny_tagger(8), tiny_train(1),
                                             tiny_train(1));
  CHECK(r.model == base.model);
}

TEST_CASE("two-stage student: pseudo data may not overlap evaluation ids") {
  auto pseudo = nd::pseudo_label(tiny_teacher(), unlabeled_pool(20, 16));
  for (const auto* split : {&tiny_split().train, &tiny_split().dev, &tiny_split().test}) {
    auto leaked = pseudo;
    leaked.utterances.back().id = split->front().id;
    CHECK_THROWS_AS(nd::train_student_two_stage(leaked, tiny_split(), tiny_tagger(8),
                                                tiny_train(1), tiny_train(1)),
                    ValidationError);
  }
  auto copy = pseudo;
  copy.utterances.back().tokens = tiny_split().test.front().tokens;
  copy.utterances.back().tags = std::vector<nc::Tag>(copy.utterances.back().tokens.size());
  CHECK_THROWS_AS(nd::train_student_two_stage(copy, tiny_split(), tiny_tagger(8), tiny_train(1),
                                              tiny_train(1)),
                  ValidationError);
}

TEST_CASE("config: seed derivation and explicit overrides") {
  const auto c = nd::pipeline_config_from_json(Json::parse(R"({"seed": 3})"));
  using nerdistill::mix_seed;
  CHECK(c.corpus.seed == mix_seed(3, 1));
  CHECK(c.corpus.noise.rng_seed == mix_seed(3, 2));
  CHECK(c.pool.seed == mix_seed(3, 3));
  CHECK(c.pool.noise.rng_seed == mix_seed(3, 4));
  CHECK(c.teacher.seed == mix_seed(3, 5));
  CHECK(c.teacher_train.seed == mix_seed(3, 6));
  CHECK(c.student.seed == mix_seed(3, 7));
  CHECK(c.stage1.seed == mix_seed(3, 8));
  CHECK(c.stage2.seed == mix_seed(3, 9));

  const auto o = nd::pipeline_config_from_json(
      Json::parse(R"({"seed": 3, "corpus": {"seed": 42}})"), 5);
  CHECK(o.seed == 5);
  CHECK(o.corpus.seed == 42);
  CHECK(o.pool.seed == mix_seed(5, 3));
}

TEST_CASE("config: defaults follow the published hyperparameters") {
  const auto c = nd::pipeline_config_from_json(Json::object());
  CHECK(c.teacher_train.batch_size == 2);
  CHECK(c.teacher_train.epochs == 3);
  CHECK(c.teacher_train.learning_rate == 5e-5);
  CHECK(c.stage1.batch_size == 32);
  CHECK(c.stage1.epochs == 5);
  CHECK(c.stage1.learning_rate == 5e-5);
  auto s2 = c.stage1;
  s2.seed = c.stage2.seed;
  CHECK(c.stage2 == s2);
  CHECK(c.pool.ratio == 30.0);
}

TEST_CASE("config: resolved form round trips") {
  const auto c = nd::pipeline_config_from_json(
      Json::parse(R"({"seed": 9, "pool": {"ratio": 4, "workers": 2}, "filter": {"min_hits": 2}})"));
  const auto j = nd::to_json(c);
  CHECK(nd::pipeline_config_from_json(j) == c);
  CHECK(nd::to_json(nd::pipeline_config_from_json(j)).dump() == j.dump());
}

TEST_CASE("config: errors name the key") {
  auto message = [](const char* text) {
    try {
      nd::pipeline_config_from_json(Json::parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"pool": {"ratoi": 3}})").find("pool.ratoi") != std::string::npos);
  CHECK(message(R"({"bogus": 1})").find("bogus") != std::string::npos);
  CHECK(message(R"({"teacher": {"train": {"epochs": "x"}}})").find("teacher.train.epochs") !=
        std::string::npos);
  CHECK(message(R"({"student": {"model": {"d_model": 50, "n_heads": 3}}})") != "no error");
  CHECK(message(R"({"pool": {"ratio": 0}})").find("pool.ratio") != std::string::npos);
}

TEST_CASE("run_pipeline: three rows, retention field, bitwise rerun") {
  const auto cfg = tiny_pipeline();
  const auto dir = std::filesystem::temp_directory_path() / "nerdistill_distill_test";
  std::filesystem::remove_all(dir);
  const auto a = nd::run_pipeline(cfg, bundled_inputs(), dir / "a");
  const auto b = nd::run_pipeline(cfg, bundled_inputs(), dir / "b");

  const auto& rows = a.report.models;
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].name == "teacher");
  CHECK(rows[1].name == "student_ft");
  CHECK(rows[2].name == "student_dtft");
  const double t = a.report.row("teacher").test.micro_f1();
  const double s = a.report.row("student_dtft").test.micro_f1();
  if (t > 0) {
    REQUIRE(a.report.retention().has_value());
    CHECK(*a.report.retention() == doctest::Approx(100.0 * s / t));
  } else {
    CHECK_FALSE(a.report.retention().has_value());
  }
  CHECK(a.report.pool_target == 2 * a.report.train_size);
  CHECK(a.report.pseudo_stats.total == a.report.pool_accepted);

  for (const char* f : {"pipeline_report.json", "teacher.ckpt", "student_ft.ckpt",
                        "student_stage1.ckpt", "student_dtft.ckpt", "pseudo.jsonl",
                        "pool.jsonl", "corpus/train.jsonl"}) {
    INFO(f);
    REQUIRE(std::filesystem::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const auto report = Json::parse(slurp(dir / "a" / "pipeline_report.json"));
  CHECK(report.at("models").size() == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_pipeline: failures name the stage") {
  auto cfg = tiny_pipeline();
  cfg.filter.use_casing = false;
  auto inputs = bundled_inputs();
  inputs.filter_gazetteers.clear();  // nothing gets accepted
  try {
    nd::run_pipeline(cfg, inputs);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "pseudo_label");
    CHECK(std::string(e.what()).rfind("pseudo_label: ", 0) == 0);
  }
  cfg = tiny_pipeline();
  cfg.corpus.count = 3;
  CHECK_THROWS_AS(nd::run_pipeline(cfg, bundled_inputs()), StageError);
}
