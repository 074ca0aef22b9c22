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

#ifndef NERDISTILL_DISTILL_PIPELINE_H_
#define NERDISTILL_DISTILL_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nerdistill/bench/report.h"
#include "nerdistill/corpus/generator.h"
#include "nerdistill/corpus/stats.h"
#include "nerdistill/distill/config.h"
#include "nerdistill/distill/filter.h"
#include "nerdistill/distill/pseudo_label.h"
#include "nerdistill/eval/score.h"
#include "nerdistill/tagger/model.h"
#include "nerdistill/tagger/trainer.h"

namespace nerdistill::distill {

nlohmann::ordered_json stats_json(const corpus::CorpusStats& stats);

// Predict every utterance with tagger::predict and score against gold.
eval::EvalResult evaluate(const tagger::TaggerModel& model,
                          std::span<const corpus::LabeledUtterance> gold);

// Vocabulary from the texts a model trains on, then a fresh init with
// config.vocab_size set to match.
tagger::TaggerModel init_for(tagger::TaggerConfig config,
                             std::span<const corpus::LabeledUtterance> training_text,
                             int vocab_min_count);

struct TeacherResult {
  tagger::TaggerModel model;
  tagger::TrainResult train;
  eval::EvalResult dev;
};

// Teacher from random init on split.train, scored on split.dev.
TeacherResult finetune_teacher(const corpus::DatasetSplit& split,
                               const tagger::TaggerConfig& config,
                               const tagger::TrainConfig& tc, int vocab_min_count = 1);

struct StudentResult {
  tagger::TaggerModel stage1_model;
  tagger::TaggerModel model;
  tagger::TrainResult stage1;
  tagger::TrainResult stage2;
};

// Stage 1 from random init on the pseudo-labeled pool, stage 2 continuing
// on gold.train only. The vocabulary covers both texts. Throws
// ValidationError when a pseudo-labeled id also appears in any gold split.
StudentResult train_student_two_stage(const PseudoLabeledSet& pseudo,
                                      const corpus::DatasetSplit& gold,
                                      const tagger::TaggerConfig& config,
                                      const tagger::TrainConfig& tc_stage1,
                                      const tagger::TrainConfig& tc_stage2,
                                      int vocab_min_count = 1);

struct BaselineResult {
  tagger::TaggerModel model;
  tagger::TrainResult train;
};

// Same student architecture, gold train only.
BaselineResult train_student_ft(const corpus::DatasetSplit& gold, const tagger::TaggerConfig& config,
                                const tagger::TrainConfig& tc, int vocab_min_count = 1);

struct PipelineInputs {
  corpus::Gazetteers gazetteers;          // corpus and pool generation
  std::vector<std::string> templates;
  corpus::Gazetteers filter_gazetteers;   // what the filter knows
};

struct PoolBuild {
  PoolSample sample;             // accepted utterances, tags stripped
  std::size_t target = 0;        // ceil(ratio * |gold train|)
  corpus::CorpusStats raw_stats;       // hidden generator labels, scanned raw pool
  corpus::CorpusStats accepted_stats;  // hidden generator labels, accepted pool
  std::vector<std::string> warnings;
};

// Generates a raw pool disjoint from `gold`, then scans it in order until
// `target` utterances have been accepted. Only the scanned prefix counts as
// raw; the generator's hidden labels are used for the stats and dropped.
PoolBuild build_pool(const PipelineConfig& config, const PipelineInputs& inputs,
                     const corpus::DatasetSplit& gold);

struct ModelRow {
  std::string name;
  std::size_t param_count = 0;
  eval::EvalResult dev;
  eval::EvalResult test;
  std::vector<double> loss;  // per-epoch, last training stage
  std::string checkpoint;    // relative to the output directory; empty when not written
  std::uint64_t init_seed = 0;
  std::uint64_t train_seed = 0;
};

struct PipelineReport {
  nlohmann::ordered_json config;  // to_json(PipelineConfig)
  nlohmann::ordered_json provenance;
  std::size_t train_size = 0, dev_size = 0, test_size = 0;
  corpus::CorpusStats train_stats;
  std::size_t pool_raw = 0, pool_accepted = 0, pool_target = 0;
  corpus::CorpusStats pool_raw_stats, pool_accepted_stats, pseudo_stats;
  std::string teacher_id;
  // teacher, student_ft, student_dtft
  std::vector<ModelRow> models;
  eval::EvalResult stage1_dev, stage1_test;
  std::vector<double> stage1_loss;
  std::vector<std::string> warnings;

  const ModelRow& row(std::string_view name) const;
  double acceptance_rate() const;
  // 100 * test F1(student_dtft) / test F1(teacher), nullopt if undefined.
  std::optional<double> retention() const;

  nlohmann::ordered_json to_json() const;
};

struct PipelineRun {
  PipelineReport report;
  std::optional<bench::BenchReport> bench;
  std::optional<tagger::TaggerModel> teacher, student_ft, student_dtft;
};

// Writes `<artifact>.meta.json` holding `provenance` next to an artifact.
void write_sidecar(const std::filesystem::path& artifact, const nlohmann::ordered_json& provenance);

// Runs every stage in order. Any failure is rethrown as StageError naming
// the stage. When out_dir is non-empty, writes the corpus, pool, pseudo
// labels, checkpoints, loss logs, pipeline_report.json and (if enabled)
// the bench artifacts; `provenance` is stored in every checkpoint and
// sidecar. The pipeline report holds no timings and no absolute paths, so
// a rerun with the same config reproduces it byte for byte.
PipelineRun run_pipeline(const PipelineConfig& config, const PipelineInputs& inputs,
                         const std::filesystem::path& out_dir = {},
                         const nlohmann::ordered_json& provenance = nlohmann::ordered_json::object());

}  // namespace nerdistill::distill

#endif  // NERDISTILL_DISTILL_PIPELINE_H_
