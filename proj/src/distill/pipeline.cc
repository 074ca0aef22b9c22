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

#include "nerdistill/distill/pipeline.h"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include "nerdistill/bench/measure.h"
#include "nerdistill/corpus/corpus_io.h"
#include "nerdistill/corpus/vocabulary.h"
#include "nerdistill/error.h"
#include "nerdistill/eval/compare.h"
#include "nerdistill/tagger/checkpoint.h"

namespace nerdistill::distill {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Raw pool is generated at target / kPlanningAcceptance; a filter that
// accepts less than this leaves the accepted pool short (reported).
constexpr double kPlanningAcceptance = 0.4;

}  // namespace

Json stats_json(const corpus::CorpusStats& s) {
  Json types;
  for (auto t : corpus::kEntityTypes) types[std::string(corpus::entity_type_name(t))] = s.count(t);
  return {{"total", s.total},
          {"positive", s.positive},
          {"negative", s.negative},
          {"positive_fraction", s.positive_fraction()},
          {"per_type", std::move(types)}};
}

namespace {

Json row_json(const ModelRow& r) {
  return {{"name", r.name},
          {"param_count", r.param_count},
          {"dev_f1", r.dev.micro_f1()},
          {"test_f1", r.test.micro_f1()},
          {"dev", eval::to_json(r.dev)},
          {"test", eval::to_json(r.test)},
          {"loss", r.loss},
          {"checkpoint", r.checkpoint},
          {"seeds", {{"init", r.init_seed}, {"train", r.train_seed}}}};
}

template <typename F>
auto run_stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, std::string(e.kind()) + ": " + e.what());
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::vector<corpus::LabeledUtterance> concat(std::span<const corpus::LabeledUtterance> a,
                                             std::span<const corpus::LabeledUtterance> b) {
  std::vector<corpus::LabeledUtterance> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void require_text_disjoint(std::span<const corpus::LabeledUtterance> pool,
                           std::span<const corpus::LabeledUtterance> eval_split) {
  std::unordered_set<std::string> texts;
  for (const auto& u : eval_split) texts.insert(u.text());
  for (const auto& u : pool) {
    if (texts.count(u.text())) {
      throw ValidationError("pool utterance '" + u.id + "' duplicates an evaluation utterance");
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

eval::EvalResult evaluate(const tagger::TaggerModel& model,
                          std::span<const corpus::LabeledUtterance> gold) {
  std::vector<corpus::LabeledUtterance> pred(gold.begin(), gold.end());
  for (auto& u : pred) u.tags = tagger::predict(model, u);
  return eval::score(gold, pred);
}

tagger::TaggerModel init_for(tagger::TaggerConfig config,
                             std::span<const corpus::LabeledUtterance> training_text,
                             int vocab_min_count) {
  auto vocab = corpus::Vocabulary::build(training_text, vocab_min_count);
  config.vocab_size = static_cast<int>(vocab.size());
  return tagger::init_model(config, std::move(vocab));
}

TeacherResult finetune_teacher(const corpus::DatasetSplit& split,
                               const tagger::TaggerConfig& config,
                               const tagger::TrainConfig& tc, int vocab_min_count) {
  if (split.train.empty()) throw ValidationError("teacher: gold train split is empty");
  auto model = init_for(config, split.train, vocab_min_count);
  auto log = tagger::train(model, split.train, tc);
  auto dev = evaluate(model, split.dev);
  return {std::move(model), std::move(log), std::move(dev)};
}

StudentResult train_student_two_stage(const PseudoLabeledSet& pseudo,
                                      const corpus::DatasetSplit& gold,
                                      const tagger::TaggerConfig& config,
                                      const tagger::TrainConfig& tc_stage1,
                                      const tagger::TrainConfig& tc_stage2,
                                      int vocab_min_count) {
  if (pseudo.utterances.empty()) throw ValidationError("student: pseudo-labeled set is empty");
  if (gold.train.empty()) throw ValidationError("student: gold train split is empty");
  for (const auto* part : {&gold.train, &gold.dev, &gold.test}) {
    corpus::require_disjoint_ids(pseudo.utterances, *part);
  }
  require_text_disjoint(pseudo.utterances, gold.dev);
  require_text_disjoint(pseudo.utterances, gold.test);

  auto model = init_for(config, concat(pseudo.utterances, gold.train), vocab_min_count);
  auto stage1 = tagger::train(model, pseudo.utterances, tc_stage1);
  auto stage1_model = model;
  auto stage2 = tagger::train(model, gold.train, tc_stage2);
  return {std::move(stage1_model), std::move(model), std::move(stage1), std::move(stage2)};
}

BaselineResult train_student_ft(const corpus::DatasetSplit& gold, const tagger::TaggerConfig& config,
                                const tagger::TrainConfig& tc, int vocab_min_count) {
  if (gold.train.empty()) throw ValidationError("student_ft: gold train split is empty");
  auto model = init_for(config, gold.train, vocab_min_count);
  auto log = tagger::train(model, gold.train, tc);
  return {std::move(model), std::move(log)};
}

PoolBuild build_pool(const PipelineConfig& config, const PipelineInputs& inputs,
                     const corpus::DatasetSplit& gold) {
  PoolBuild out;
  out.target = static_cast<std::size_t>(
      std::ceil(config.pool.ratio * static_cast<double>(gold.train.size())));
  if (out.target == 0) throw ValidationError("pool: target size is 0");
  const auto raw_size =
      static_cast<std::size_t>(std::ceil(static_cast<double>(out.target) / kPlanningAcceptance));
  const auto raw = corpus::generate_pool(inputs.gazetteers, inputs.templates, raw_size,
                                         config.pool.noise, config.pool.seed,
                                         config.pool.entity_fraction, gold);
  const EntityLikelihoodFilter filter(inputs.filter_gazetteers, config.filter);
  std::size_t scanned = 0, accepted = 0;
  while (scanned < raw.size() && accepted < out.target) {
    accepted += filter.accepts(raw[scanned]) ? 1 : 0;
    ++scanned;
  }
  const std::span<const corpus::LabeledUtterance> prefix(raw.data(), scanned);
  out.sample = sample_pool(prefix, filter);
  out.raw_stats = corpus::corpus_stats(prefix);
  out.accepted_stats = corpus::corpus_stats(out.sample.accepted);
  out.sample.accepted = corpus::strip_tags(out.sample.accepted);
  if (out.sample.accepted.size() < out.target) {
    out.warnings.push_back("pool: accepted " + std::to_string(out.sample.accepted.size()) +
                           " of target " + std::to_string(out.target));
  }
  return out;
}

const ModelRow& PipelineReport::row(std::string_view name) const {
  for (const auto& r : models) {
    if (r.name == name) return r;
  }
  throw ValidationError("pipeline report has no row '" + std::string(name) + "'");
}

double PipelineReport::acceptance_rate() const {
  return pool_raw == 0 ? 0.0 : static_cast<double>(pool_accepted) / static_cast<double>(pool_raw);
}

std::optional<double> PipelineReport::retention() const {
  return eval::retention_percent(row(eval::kStudentDtftName).test.micro_f1(),
                                 row(eval::kTeacherName).test.micro_f1());
}

Json PipelineReport::to_json() const {
  Json j;
  j["format"] = "nerdistill.pipeline_report";
  j["version"] = 1;
  j["provenance"] = provenance;
  j["config"] = config;
  j["corpus"] = {{"train", train_size},
                 {"dev", dev_size},
                 {"test", test_size},
                 {"train_stats", stats_json(train_stats)}};
  j["pool"] = {{"target", pool_target},
               {"raw", pool_raw},
               {"accepted", pool_accepted},
               {"acceptance_rate", acceptance_rate()},
               {"raw_positive_fraction", pool_raw_stats.positive_fraction()},
               {"accepted_positive_fraction", pool_accepted_stats.positive_fraction()},
               {"raw_stats", stats_json(pool_raw_stats)},
               {"accepted_stats", stats_json(pool_accepted_stats)},
               {"pseudo_stats", stats_json(pseudo_stats)},
               {"teacher_id", teacher_id}};
  Json rows = Json::array();
  for (const auto& r : models) rows.push_back(row_json(r));
  j["models"] = std::move(rows);
  j["student_dtft_stage1"] = {{"dev_f1", stage1_dev.micro_f1()},
                              {"test_f1", stage1_test.micro_f1()},
                              {"dev", eval::to_json(stage1_dev)},
                              {"test", eval::to_json(stage1_test)},
                              {"loss", stage1_loss}};
  const auto ret = retention();
  j["retention_pct"] = ret ? Json(*ret) : Json(nullptr);
  j["warnings"] = warnings;
  return j;
}

void write_sidecar(const fs::path& artifact, const Json& provenance) {
  write_text(fs::path(artifact.string() + ".meta.json"), provenance.dump(2) + "\n");
}

PipelineRun run_pipeline(const PipelineConfig& config, const PipelineInputs& inputs,
                         const fs::path& out_dir, const Json& provenance) {
  run_stage("config", [&] { config.validate(); });
  const bool write = !out_dir.empty();
  auto artifact = [&](const fs::path& rel, const Json& extra) {
    Json meta = provenance;
    for (const auto& item : extra.items()) meta[item.key()] = item.value();
    write_sidecar(out_dir / rel, meta);
    return meta;
  };
  if (write) {
    run_stage("write", [&] {
      fs::create_directories(out_dir / "corpus");
      fs::create_directories(out_dir / "logs");
    });
  }

  PipelineRun run;
  PipelineReport& rep = run.report;
  rep.config = to_json(config);
  rep.provenance = provenance;

  corpus::NoiseConfig corpus_noise = config.corpus.noise;
  const auto split = run_stage("corpus", [&] {
    corpus::GeneratorOptions opts;
    opts.entity_fraction = config.corpus.entity_fraction;
    auto s = corpus::generate_corpus(inputs.gazetteers, inputs.templates, config.corpus.count,
                                     corpus_noise, config.corpus.seed, opts);
    corpus::validate_split(s);
    return s;
  });
  rep.train_size = split.train.size();
  rep.dev_size = split.dev.size();
  rep.test_size = split.test.size();
  rep.train_stats = corpus::corpus_stats(split.train);
  if (write) {
    run_stage("write", [&] {
      for (auto [name, part] : {std::pair{"train", &split.train}, std::pair{"dev", &split.dev},
                                std::pair{"test", &split.test}}) {
        const fs::path rel = fs::path("corpus") / (std::string(name) + ".jsonl");
        corpus::write_jsonl(*part, out_dir / rel);
        artifact(rel, {{"artifact", "corpus"}, {"split", name}, {"seed", config.corpus.seed}});
      }
    });
  }

  const auto pool = run_stage("pool", [&] { return build_pool(config, inputs, split); });
  rep.pool_target = pool.target;
  rep.pool_raw = pool.sample.raw_count;
  rep.pool_accepted = pool.sample.accepted.size();
  rep.pool_raw_stats = pool.raw_stats;
  rep.pool_accepted_stats = pool.accepted_stats;
  rep.warnings.insert(rep.warnings.end(), pool.warnings.begin(), pool.warnings.end());
  if (write) {
    run_stage("write", [&] {
      corpus::write_jsonl(pool.sample.accepted, out_dir / "pool.jsonl");
      artifact("pool.jsonl", {{"artifact", "pool"}, {"seed", config.pool.seed}});
    });
  }

  auto save_model = [&](const tagger::TaggerModel& m, const std::string& name,
                        const tagger::TrainConfig& tc, const std::vector<double>& loss) {
    if (!write) return std::string();
    return run_stage("write", [&] {
      const std::string rel = name + ".ckpt";
      const Json meta = artifact(rel, {{"artifact", "checkpoint"},
                                       {"model", name},
                                       {"init_seed", m.config().seed},
                                       {"train_seed", tc.seed}});
      tagger::save(m, out_dir / rel, meta);
      tagger::write_loss_log(loss, out_dir / "logs" / (name + "_loss.csv"));
      return rel;
    });
  };

  auto teacher = run_stage("teacher", [&] {
    return finetune_teacher(split, config.teacher, config.teacher_train, config.vocab_min_count);
  });
  ModelRow trow{std::string(eval::kTeacherName), tagger::param_count(teacher.model), teacher.dev,
                {}, teacher.train.epoch_losses, {}, teacher.model.config().seed,
                config.teacher_train.seed};
  trow.test = run_stage("evaluate", [&] { return evaluate(teacher.model, split.test); });
  trow.checkpoint = save_model(teacher.model, trow.name, config.teacher_train, trow.loss);

  const auto pseudo = run_stage("pseudo_label", [&] {
    return pseudo_label(teacher.model, pool.sample.accepted, config.pool.workers);
  });
  rep.pseudo_stats = pseudo.stats;
  rep.teacher_id = pseudo.teacher_id;
  if (write) {
    run_stage("write", [&] {
      corpus::write_jsonl(pseudo.utterances, out_dir / "pseudo.jsonl");
      artifact("pseudo.jsonl", {{"artifact", "pseudo_labels"}, {"teacher_id", pseudo.teacher_id}});
    });
  }

  auto ft = run_stage("student_ft", [&] {
    return train_student_ft(split, config.student, config.stage2, config.vocab_min_count);
  });
  ModelRow frow{std::string(eval::kStudentFtName), tagger::param_count(ft.model), {}, {},
                ft.train.epoch_losses, {}, ft.model.config().seed, config.stage2.seed};
  run_stage("evaluate", [&] {
    frow.dev = evaluate(ft.model, split.dev);
    frow.test = evaluate(ft.model, split.test);
  });
  frow.checkpoint = save_model(ft.model, frow.name, config.stage2, frow.loss);

  auto dtft = run_stage("student_dtft", [&] {
    return train_student_two_stage(pseudo, split, config.student, config.stage1, config.stage2,
                                   config.vocab_min_count);
  });
  ModelRow drow{std::string(eval::kStudentDtftName), tagger::param_count(dtft.model), {}, {},
                dtft.stage2.epoch_losses, {}, dtft.model.config().seed, config.stage2.seed};
  run_stage("evaluate", [&] {
    drow.dev = evaluate(dtft.model, split.dev);
    drow.test = evaluate(dtft.model, split.test);
    rep.stage1_dev = evaluate(dtft.stage1_model, split.dev);
    rep.stage1_test = evaluate(dtft.stage1_model, split.test);
  });
  rep.stage1_loss = dtft.stage1.epoch_losses;
  save_model(dtft.stage1_model, "student_stage1", config.stage1, rep.stage1_loss);
  drow.checkpoint = save_model(dtft.model, drow.name, config.stage2, drow.loss);

  for (const auto* tr : {&teacher.train, &ft.train, &dtft.stage1, &dtft.stage2}) {
    rep.warnings.insert(rep.warnings.end(), tr->warnings.begin(), tr->warnings.end());
  }
  rep.models = {trow, frow, drow};

  if (write) {
    run_stage("write", [&] {
      write_text(out_dir / "pipeline_report.json", rep.to_json().dump(2) + "\n");
      artifact("pipeline_report.json", {{"artifact", "pipeline_report"}});
    });
  }

  if (config.bench.enabled) {
    run_stage("bench", [&] {
      const auto t = bench::measure(teacher.model, split.test, config.bench.warmup,
                                    config.bench.iterations);
      const auto f = bench::measure(ft.model, split.test, config.bench.warmup,
                                    config.bench.iterations);
      const auto d = bench::measure(dtft.model, split.test, config.bench.warmup,
                                    config.bench.iterations);
      run.bench = bench::report(t, d, trow.test, drow.test);
      if (write) {
        fs::create_directories(out_dir / "bench");
        Json j = run.bench->to_json();
        j["student_ft"] = {{"name", frow.name},
                           {"f1", frow.test.micro_f1()},
                           {"latency", bench::to_json(f)}};
        write_text(out_dir / "bench_report.json", j.dump(2) + "\n");
        write_text(out_dir / "bench_report.txt", run.bench->to_text());
        artifact("bench_report.json", {{"artifact", "bench_report"}});
        bench::write_samples_csv(t, out_dir / "bench" / "teacher_samples.csv");
        bench::write_samples_csv(f, out_dir / "bench" / "student_ft_samples.csv");
        bench::write_samples_csv(d, out_dir / "bench" / "student_dtft_samples.csv");
        const auto table = eval::compare(
            {{trow.name, trow.test}, {frow.name, frow.test}, {drow.name, drow.test}},
            {{trow.name, t.mean_ms()}, {frow.name, f.mean_ms()}, {drow.name, d.mean_ms()}});
        write_text(out_dir / "comparison.txt", table.to_text());
        write_text(out_dir / "comparison.csv", table.to_csv());
      }
    });
  }

  run.teacher = std::move(teacher.model);
  run.student_ft = std::move(ft.model);
  run.student_dtft = std::move(dtft.model);
  return run;
}

}  // namespace nerdistill::distill
