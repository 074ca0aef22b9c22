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

#include "nerdistill/cli/stages.h"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "nerdistill/bench/measure.h"
#include "nerdistill/bench/report.h"
#include "nerdistill/corpus/corpus_io.h"
#include "nerdistill/distill/pipeline.h"
#include "nerdistill/error.h"
#include "nerdistill/eval/compare.h"
#include "nerdistill/tagger/checkpoint.h"

namespace nerdistill::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

Json sidecar_meta(const RunConfig& rc, const Json& extra) {
  Json meta = rc.provenance();
  for (const auto& item : extra.items()) meta[item.key()] = item.value();
  return meta;
}

// Writes the sidecar and returns the metadata (checkpoints embed it too).
Json mark(const fs::path& artifact, const RunConfig& rc, const Json& extra) {
  Json meta = sidecar_meta(rc, extra);
  distill::write_sidecar(artifact, meta);
  return meta;
}

Json read_sidecar(const fs::path& artifact) {
  const fs::path side(artifact.string() + ".meta.json");
  if (!fs::is_regular_file(side)) return nullptr;
  try {
    return Json::parse(slurp(side));
  } catch (const nlohmann::json::exception&) {
    throw FormatError("unreadable sidecar " + side.string());
  }
}

struct Context {
  RunConfig rc;
  StageOptions opts;
  fs::path out;

  fs::path at(const char* rel) const { return out / rel; }

  corpus::DatasetSplit load_split() const {
    corpus::DatasetSplit s;
    for (auto [rel, part] : {std::pair{artifacts::kTrain, &s.train},
                             std::pair{artifacts::kDev, &s.dev},
                             std::pair{artifacts::kTest, &s.test}}) {
      require_artifact(at(rel), rc, opts);
      *part = corpus::read_jsonl(at(rel));
    }
    corpus::validate_split(s);
    return s;
  }

  tagger::TaggerModel load_model(const char* rel) const {
    require_artifact(at(rel), rc, opts);
    return tagger::load(at(rel));
  }
};

void save_model(const Context& ctx, const tagger::TaggerModel& m, const char* rel,
                const std::string& name, const tagger::TrainConfig& tc,
                const std::vector<double>& loss) {
  const Json meta = mark(ctx.at(rel), ctx.rc,
                         {{"artifact", "checkpoint"},
                          {"model", name},
                          {"init_seed", m.config().seed},
                          {"train_seed", tc.seed}});
  tagger::save(m, ctx.at(rel), meta);
  fs::create_directories(ctx.out / "logs");
  tagger::write_loss_log(loss, ctx.out / "logs" / (name + "_loss.csv"));
}

void gen_corpus(const Context& ctx, std::ostream& out) {
  const auto inputs = ctx.rc.load_inputs();
  const auto& c = ctx.rc.pipeline.corpus;
  corpus::GeneratorOptions opts;
  opts.entity_fraction = c.entity_fraction;
  const auto split =
      corpus::generate_corpus(inputs.gazetteers, inputs.templates, c.count, c.noise, c.seed, opts);
  corpus::validate_split(split);
  fs::create_directories(ctx.out / "corpus");
  for (auto [rel, name, part] :
       {std::tuple{artifacts::kTrain, "train", &split.train},
        std::tuple{artifacts::kDev, "dev", &split.dev},
        std::tuple{artifacts::kTest, "test", &split.test}}) {
    corpus::write_jsonl(*part, ctx.at(rel));
    mark(ctx.at(rel), ctx.rc, {{"artifact", "corpus"}, {"split", name}, {"seed", c.seed}});
  }
  out << fmt::format("corpus: train {} dev {} test {} -> {}\n", split.train.size(),
                     split.dev.size(), split.test.size(), (ctx.out / "corpus").string());
}

void train_teacher(const Context& ctx, std::ostream& out) {
  const auto split = ctx.load_split();
  const auto& p = ctx.rc.pipeline;
  auto t = distill::finetune_teacher(split, p.teacher, p.teacher_train, p.vocab_min_count);
  save_model(ctx, t.model, artifacts::kTeacher, "teacher", p.teacher_train,
             t.train.epoch_losses);
  out << fmt::format("teacher: dev f1 {:.4f}, {} parameters -> {}\n", t.dev.micro_f1(),
                     tagger::param_count(t.model), ctx.at(artifacts::kTeacher).string());
}

void sample_pool(const Context& ctx, std::ostream& out) {
  const auto split = ctx.load_split();
  const auto inputs = ctx.rc.load_inputs();
  const auto pool = distill::build_pool(ctx.rc.pipeline, inputs, split);
  corpus::write_jsonl(pool.sample.accepted, ctx.at(artifacts::kPool));
  mark(ctx.at(artifacts::kPool), ctx.rc, {{"artifact", "pool"}, {"seed", ctx.rc.pipeline.pool.seed}});
  Json stats = {{"config_hash", ctx.rc.hash},
                {"target", pool.target},
                {"raw", pool.sample.raw_count},
                {"accepted", pool.sample.accepted.size()},
                {"acceptance_rate", pool.sample.acceptance_rate()},
                {"raw_positive_fraction", pool.raw_stats.positive_fraction()},
                {"accepted_positive_fraction", pool.accepted_stats.positive_fraction()},
                {"raw_stats", distill::stats_json(pool.raw_stats)},
                {"accepted_stats", distill::stats_json(pool.accepted_stats)},
                {"warnings", pool.warnings}};
  write_text(ctx.at(artifacts::kPoolStats), stats.dump(2) + "\n");
  out << fmt::format("pool: accepted {} of {} scanned (rate {:.3f}); positive share {:.3f} -> {:.3f}\n",
                     pool.sample.accepted.size(), pool.sample.raw_count,
                     pool.sample.acceptance_rate(), pool.raw_stats.positive_fraction(),
                     pool.accepted_stats.positive_fraction());
  for (const auto& w : pool.warnings) out << "warning: " << w << "\n";
}

void pseudo_label(const Context& ctx, std::ostream& out) {
  const auto teacher = ctx.load_model(artifacts::kTeacher);
  require_artifact(ctx.at(artifacts::kPool), ctx.rc, ctx.opts);
  const auto pool = corpus::read_jsonl(ctx.at(artifacts::kPool));
  const auto set = distill::pseudo_label(teacher, pool, ctx.rc.pipeline.pool.workers);
  corpus::write_jsonl(set.utterances, ctx.at(artifacts::kPseudo));
  mark(ctx.at(artifacts::kPseudo), ctx.rc,
       {{"artifact", "pseudo_labels"},
        {"teacher_id", set.teacher_id},
        {"stats", distill::stats_json(set.stats)}});
  out << fmt::format("pseudo-label: {} utterances, {} with entities, teacher {}\n",
                     set.stats.total, set.stats.positive, set.teacher_id);
}

void train_student(const Context& ctx, const std::string& variant, std::ostream& out) {
  const auto split = ctx.load_split();
  const auto& p = ctx.rc.pipeline;
  if (variant == "dtft" || variant == "both") {
    require_artifact(ctx.at(artifacts::kPseudo), ctx.rc, ctx.opts);
    distill::PseudoLabeledSet set;
    set.utterances = corpus::read_jsonl(ctx.at(artifacts::kPseudo));
    set.stats = corpus::corpus_stats(set.utterances);
    const Json meta = read_sidecar(ctx.at(artifacts::kPseudo));
    if (meta.is_object() && meta.contains("teacher_id")) set.teacher_id = meta["teacher_id"];
    auto s = distill::train_student_two_stage(set, split, p.student, p.stage1, p.stage2,
                                              p.vocab_min_count);
    save_model(ctx, s.stage1_model, artifacts::kStage1, "student_stage1", p.stage1,
               s.stage1.epoch_losses);
    save_model(ctx, s.model, artifacts::kStudentDtft, "student_dtft", p.stage2,
               s.stage2.epoch_losses);
    out << fmt::format("student_dtft: dev f1 {:.4f} (stage 1 {:.4f}) -> {}\n",
                       distill::evaluate(s.model, split.dev).micro_f1(),
                       distill::evaluate(s.stage1_model, split.dev).micro_f1(),
                       ctx.at(artifacts::kStudentDtft).string());
  }
  if (variant == "ft" || variant == "both") {
    auto b = distill::train_student_ft(split, p.student, p.stage2, p.vocab_min_count);
    save_model(ctx, b.model, artifacts::kStudentFt, "student_ft", p.stage2, b.train.epoch_losses);
    out << fmt::format("student_ft: dev f1 {:.4f} -> {}\n",
                       distill::evaluate(b.model, split.dev).micro_f1(),
                       ctx.at(artifacts::kStudentFt).string());
  }
}

const std::vector<std::pair<std::string, const char*>>& model_files() {
  static const std::vector<std::pair<std::string, const char*>> kFiles = {
      {"teacher", artifacts::kTeacher},
      {"student_ft", artifacts::kStudentFt},
      {"student_dtft", artifacts::kStudentDtft}};
  return kFiles;
}

void evaluate_files(const fs::path& gold_path, const fs::path& pred_path, std::ostream& out) {
  const auto gold = corpus::read_jsonl(gold_path);
  corpus::ReadOptions loose;
  loose.require_bio_valid = false;
  const auto pred = corpus::read_jsonl(pred_path, loose);
  out << eval::to_json(eval::score(gold, pred)).dump(2) << "\n";
}

void evaluate_models(const Context& ctx, const std::string& split_name,
                     const std::vector<std::string>& model_paths, std::ostream& out) {
  const auto split = ctx.load_split();
  const auto& data = split_name == "dev" ? split.dev : split.test;
  std::map<std::string, eval::EvalResult> results;
  if (!model_paths.empty()) {
    for (const auto& p : model_paths) {
      require_artifact(p, ctx.rc, ctx.opts);
      results[fs::path(p).stem().string()] = distill::evaluate(tagger::load(p), data);
    }
  } else {
    for (const auto& [name, rel] : model_files()) {
      if (!fs::exists(ctx.at(rel))) continue;
      results[name] = distill::evaluate(ctx.load_model(rel), data);
    }
    if (results.empty()) {
      throw IoError("missing artifact from a prior stage: expected " +
                    ctx.at(artifacts::kTeacher).string());
    }
  }
  Json report = {{"config_hash", ctx.rc.hash}, {"split", split_name}};
  Json models = Json::object();
  for (const auto& [name, r] : results) models[name] = eval::to_json(r);
  report["models"] = std::move(models);
  write_text(ctx.at(artifacts::kEvalReport), report.dump(2) + "\n");
  out << eval::compare(results, {}).to_text();
}

void run_bench(const Context& ctx, std::ostream& out) {
  const auto split = ctx.load_split();
  const auto& b = ctx.rc.pipeline.bench;
  const auto teacher = ctx.load_model(artifacts::kTeacher);
  const auto dtft = ctx.load_model(artifacts::kStudentDtft);
  const auto t = bench::measure(teacher, split.test, b.warmup, b.iterations);
  const auto d = bench::measure(dtft, split.test, b.warmup, b.iterations);
  const auto te = distill::evaluate(teacher, split.test);
  const auto de = distill::evaluate(dtft, split.test);
  const auto rep = bench::report(t, d, te, de);
  Json j = rep.to_json();
  std::map<std::string, eval::EvalResult> results = {{"teacher", te}, {"student_dtft", de}};
  std::map<std::string, double> lat = {{"teacher", t.mean_ms()}, {"student_dtft", d.mean_ms()}};
  fs::create_directories(ctx.out / "bench");
  if (fs::exists(ctx.at(artifacts::kStudentFt))) {
    const auto ft = ctx.load_model(artifacts::kStudentFt);
    const auto f = bench::measure(ft, split.test, b.warmup, b.iterations);
    results["student_ft"] = distill::evaluate(ft, split.test);
    lat["student_ft"] = f.mean_ms();
    j["student_ft"] = {{"name", "student_ft"},
                       {"f1", results["student_ft"].micro_f1()},
                       {"latency", bench::to_json(f)}};
    bench::write_samples_csv(f, ctx.out / "bench" / "student_ft_samples.csv");
  }
  write_text(ctx.at(artifacts::kBenchReport), j.dump(2) + "\n");
  mark(ctx.at(artifacts::kBenchReport), ctx.rc, {{"artifact", "bench_report"}});
  write_text(ctx.out / "bench_report.txt", rep.to_text());
  bench::write_samples_csv(t, ctx.out / "bench" / "teacher_samples.csv");
  bench::write_samples_csv(d, ctx.out / "bench" / "student_dtft_samples.csv");
  const auto table = eval::compare(results, lat);
  write_text(ctx.out / "comparison.txt", table.to_text());
  write_text(ctx.out / "comparison.csv", table.to_csv());
  out << rep.to_text() << table.to_text();
}

void run_full(const Context& ctx, std::ostream& out) {
  const auto inputs = ctx.rc.load_inputs();
  const auto run = distill::run_pipeline(ctx.rc.pipeline, inputs, ctx.out, ctx.rc.provenance());
  const auto& r = run.report;
  out << fmt::format("pool: {} accepted of {} scanned; positive share {:.3f} -> {:.3f}\n",
                     r.pool_accepted, r.pool_raw, r.pool_raw_stats.positive_fraction(),
                     r.pool_accepted_stats.positive_fraction());
  std::map<std::string, eval::EvalResult> results;
  for (const auto& m : r.models) results[m.name] = m.test;
  std::map<std::string, double> lat;
  if (fs::exists(ctx.out / "comparison.txt")) {
    out << slurp(ctx.out / "comparison.txt");
  } else {
    out << eval::compare(results, lat).to_text();
  }
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  out << "report: " << ctx.at(artifacts::kPipelineReport).string() << "\n";
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

void require_artifact(const fs::path& path, const RunConfig& rc, const StageOptions& opts) {
  if (!fs::exists(path)) {
    throw IoError("missing artifact from a prior stage: expected " + path.string());
  }
  if (opts.allow_config_mismatch) return;
  const Json meta = read_sidecar(path);
  if (!meta.is_object() || !meta.contains("config_hash")) {
    throw ConfigError("artifact " + path.string() +
                      " has no config sidecar; pass --allow-config-mismatch to use it anyway");
  }
  const std::string hash = meta["config_hash"].get<std::string>();
  if (hash != rc.hash) {
    throw ConfigError("artifact " + path.string() + " was produced with config hash " + hash +
                      ", current config hash is " + rc.hash +
                      "; pass --allow-config-mismatch to use it anyway");
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distill-then-fine-tune NER on synthetic call transcripts", "nerdistill"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool allow_mismatch = false;
  bool version = false;
  app.add_flag("--version", version, "Print the version and checkpoint format version");
  app.add_option("-c,--config", config_path, "Run config (JSON)");
  app.add_option("--seed", seed, "Override the global seed");
  app.add_option("--out-dir", out_dir, "Override paths.out_dir");
  app.add_flag("--allow-config-mismatch", allow_mismatch,
               "Accept prior-stage artifacts produced under another config");

  auto* gen = app.add_subcommand("gen-corpus", "Generate the gold train/dev/test corpus");
  auto* teach = app.add_subcommand("train-teacher", "Train the teacher on gold train");
  auto* pool = app.add_subcommand("sample-pool", "Generate and filter the distillation pool");
  auto* pseudo = app.add_subcommand("pseudo-label", "Label the pool with the teacher");
  auto* student = app.add_subcommand("train-student", "Train the students");
  std::string variant = "both";
  student->add_option("--variant", variant, "dtft, ft or both")
      ->check(CLI::IsMember({"dtft", "ft", "both"}));
  auto* evaluate = app.add_subcommand("evaluate", "Score checkpoints or a prediction file");
  std::string gold_file, pred_file, split_name = "test";
  std::vector<std::string> model_paths;
  evaluate->add_option("--gold", gold_file, "Gold JSONL (with --pred)");
  evaluate->add_option("--pred", pred_file, "Predicted JSONL (with --gold)");
  evaluate->add_option("--model", model_paths, "Checkpoint(s) to score; default: all present");
  evaluate->add_option("--split", split_name, "dev or test")->check(CLI::IsMember({"dev", "test"}));
  auto* bench_cmd = app.add_subcommand("bench", "Measure per-utterance latency");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write both reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage_error: " << one_line(e.what()) << "\n";
    return 2;
  }

  if (version) {
    out << fmt::format("nerdistill {} (checkpoint format {})\n", NERDISTILL_VERSION,
                       tagger::kCheckpointVersion);
    return 0;
  }
  try {
    if (app.get_subcommands().empty()) {
      throw ConfigError("no subcommand given; see --help");
    }
    const CLI::App* cmd = app.get_subcommands().front();
    if (cmd == evaluate && (!gold_file.empty() || !pred_file.empty())) {
      if (gold_file.empty() || pred_file.empty()) {
        throw ConfigError("evaluate: --gold and --pred go together");
      }
      evaluate_files(gold_file, pred_file, out);
      return 0;
    }
    if (config_path.empty()) throw ConfigError("--config is required");
    Overrides ov;
    ov.seed = seed;
    if (!out_dir.empty()) ov.out_dir = out_dir;
    Context ctx{load_run_config(config_path, ov), {allow_mismatch}, {}};
    ctx.out = ctx.rc.paths.out_dir;
    fs::create_directories(ctx.out);
    write_text(ctx.at(artifacts::kResolvedConfig), ctx.rc.provenance().dump(2) + "\n");

    if (cmd == gen) {
      gen_corpus(ctx, out);
    } else if (cmd == teach) {
      train_teacher(ctx, out);
    } else if (cmd == pool) {
      sample_pool(ctx, out);
    } else if (cmd == pseudo) {
      pseudo_label(ctx, out);
    } else if (cmd == student) {
      train_student(ctx, variant, out);
    } else if (cmd == evaluate) {
      evaluate_models(ctx, split_name, model_paths, out);
    } else if (cmd == bench_cmd) {
      run_bench(ctx, out);
    } else if (cmd == pipeline) {
      run_full(ctx, out);
    }
    return 0;
  } catch (const ConfigError& e) {
    err << e.kind() << ": " << one_line(e.what()) << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.kind() << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal_error: " << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace nerdistill::cli
