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

// Acceptance checks, one PASS/FAIL line each.
//
//   acceptance            run all nine
//   acceptance 3 7        run only the listed ones
//
// Exit status is 0 only if every selected check passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "nerdistill/bench/measure.h"
#include "nerdistill/bench/report.h"
#include "nerdistill/cli/run_config.h"
#include "nerdistill/cli/stages.h"
#include "nerdistill/corpus/generator.h"
#include "nerdistill/corpus/tags.h"
#include "nerdistill/corpus/vocabulary.h"
#include "nerdistill/distill/pipeline.h"
#include "nerdistill/eval/compare.h"
#include "nerdistill/eval/score.h"
#include "nerdistill/rng.h"
#include "nerdistill/tagger/loss.h"
#include "nerdistill/tagger/model.h"
#include "test_util.h"

namespace fs = std::filesystem;
namespace nc = nerdistill::corpus;
namespace nd = nerdistill::distill;
namespace ne = nerdistill::eval;
namespace ng = nerdistill::tagger;
namespace nb = nerdistill::bench;
namespace nt = nerdistill::testing;
using nerdistill::Rng;

namespace {

// Pinned tolerances.
constexpr double kGradRelTol = 1e-3;
constexpr double kGradFloor = 1e-7;      // below this both sides count as zero
constexpr double kGradAbsTol = 1e-9;     // ...and must agree absolutely
constexpr double kGradStep = 1e-4;
constexpr double kGradBudgetSec = 60.0;
constexpr double kLossTol = 1e-6;
constexpr int kRoundTrips = 10000;
constexpr int kMaxExhaustiveLen = 5;
constexpr int kF1Pairs = 1000;
constexpr int kOrderingSeeds = 5;
constexpr double kOrderingMargin = 0.5;  // F1 points
constexpr double kOrderingBudgetSec = 30 * 60.0;
constexpr double kRatioLo = 6.0, kRatioHi = 9.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path config_dir() { return NERDISTILL_CONFIG_DIR; }
fs::path benchmark_config() { return config_dir() / "benchmark.json"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 1 -------------------------------------------------------------------------

Verdict gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  ng::TaggerConfig c;
  c.vocab_size = 12;
  c.d_model = 8;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_len = 7;
  c.dropout_rate = 0.0;
  c.seed = 21;
  std::vector<std::string> tokens = {"<pad>", "<unk>"};
  for (int i = 2; i < c.vocab_size; ++i) tokens.push_back("w" + std::to_string(i));
  auto model = ng::init_model<double>(c, nc::Vocabulary::from_tokens(tokens));
  // Nudge gains and biases off their init values so their gradients are
  // not special cases.
  Rng rng(5);
  for (auto& p : model.parameters()) p += 0.05 * (nerdistill::uniform01(rng) - 0.5);

  std::vector<std::vector<std::int32_t>> ids = {{2, 5, 7, 3, 11}, {9, 4, 4}, {1, 6}};
  std::vector<std::vector<std::int32_t>> targets = {{0, 1, 2, 0, 5}, {5, 6, 3}, {4, 0}};
  const auto batch = ng::make_batch(ids, targets, c.max_len);
  const auto grad = ng::ForwardPass<double>(model, batch, false).backward();
  auto params = model.parameters();
  if (grad.size() != params.size()) return {false, "gradient size mismatch"};

  double worst = 0.0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + kGradStep;
    const double up = ng::cross_entropy(ng::forward(model, batch, false), batch);
    params[i] = saved - kGradStep;
    const double down = ng::cross_entropy(ng::forward(model, batch, false), batch);
    params[i] = saved;
    const double numeric = (up - down) / (2 * kGradStep);
    const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
    if (scale < kGradFloor) {
      if (std::abs(numeric - grad[i]) >= kGradAbsTol) ++bad;
      continue;
    }
    const double rel = std::abs(numeric - grad[i]) / scale;
    worst = std::max(worst, rel);
    if (rel >= kGradRelTol) ++bad;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < kGradBudgetSec,
          fmt::format("{} params, max rel err {:.2e}, {} over tolerance, {:.1f}s", params.size(),
                      worst, bad, secs)};
}

// 2 -------------------------------------------------------------------------

Verdict loss_closed_forms() {
  std::vector<std::vector<std::int32_t>> ids = {{2, 3, 4}, {5, 6}};
  std::vector<std::vector<std::int32_t>> targets = {{0, 3, 6}, {1, 2}};
  const auto batch = ng::make_batch(ids, targets, 4);
  const int C = nc::Tag::kNumClasses;
  ng::Logits<double> zeros{2, 4, C, std::vector<double>(2 * 4 * C, 0.0)};
  const double zero_loss = ng::cross_entropy(zeros, batch);
  const double zero_err = std::abs(zero_loss - std::log(7.0));

  Rng rng(11);
  ng::Logits<double> base = zeros;
  for (auto& v : base.values) v = 6.0 * (nerdistill::uniform01(rng) - 0.5);
  double worst_shift = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ng::Logits<double> shifted = base;
    for (int n = 0; n < 2; ++n) {
      for (int t = 0; t < 4; ++t) {
        const double k = 200.0 * (nerdistill::uniform01(rng) - 0.5);
        for (int c = 0; c < C; ++c) shifted.at(n, t, c) += k;
      }
    }
    worst_shift = std::max(worst_shift, std::abs(ng::cross_entropy(shifted, batch) -
                                                 ng::cross_entropy(base, batch)));
  }
  return {C == 7 && zero_err < kLossTol && worst_shift < kLossTol,
          fmt::format("|CE(0) - ln 7| = {:.1e}, max shift deviation {:.1e}", zero_err,
                      worst_shift)};
}

// 3 -------------------------------------------------------------------------

bool reference_valid(const std::vector<std::string>& tags) {
  std::string prev = "O";
  for (const auto& t : tags) {
    if (t.rfind("I-", 0) == 0) {
      const std::string type = t.substr(2);
      if (prev != "B-" + type && prev != "I-" + type) return false;
    }
    prev = t;
  }
  return true;
}

Verdict bio_codec() {
  Rng rng(2026);
  std::size_t round_trip_fail = 0;
  for (int i = 0; i < kRoundTrips; ++i) {
    const std::size_t len = 1 + nerdistill::uniform_index(rng, 24);
    const auto spans = nt::random_spans(rng, len);
    const auto tags = nc::bio_encode(spans, len);
    if (nc::bio_decode(tags) != spans || !nc::is_bio_valid(tags)) ++round_trip_fail;
  }

  std::size_t sequences = 0, decode_fail = 0, repair_fail = 0;
  for (int len = 0; len <= kMaxExhaustiveLen; ++len) {
    std::size_t total = 1;
    for (int k = 0; k < len; ++k) total *= nc::Tag::kNumClasses;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<nc::Tag> tags;
      std::size_t rest = code;
      for (int k = 0; k < len; ++k) {
        tags.push_back(nc::Tag::from_index(static_cast<int>(rest % nc::Tag::kNumClasses)));
        rest /= nc::Tag::kNumClasses;
      }
      ++sequences;
      const auto names = nt::tag_names(tags);
      const auto decoded = nc::bio_decode(tags);
      if (nt::to_ref(decoded) != nt::reference_decode(names)) ++decode_fail;
      const auto repaired = nc::bio_repair(tags);
      const bool valid = reference_valid(names);
      const bool ok = nc::is_bio_valid(tags) == valid && nc::is_bio_valid(repaired) &&
                      nt::reference_decode(nt::tag_names(repaired)) ==
                          nt::reference_decode(names) &&
                      (repaired == tags) == valid;
      if (!ok) ++repair_fail;
    }
  }
  return {round_trip_fail == 0 && decode_fail == 0 && repair_fail == 0,
          fmt::format("{} round trips ({} bad); {} sequences of length <= {} ({} decode, {} "
                      "repair mismatches)",
                      kRoundTrips, round_trip_fail, sequences, kMaxExhaustiveLen, decode_fail,
                      repair_fail)};
}

// 4 -------------------------------------------------------------------------

Verdict f1_oracle() {
  Rng rng(404);
  std::size_t mismatches = 0;
  for (int pair = 0; pair < kF1Pairs; ++pair) {
    std::vector<nc::LabeledUtterance> gold, pred;
    const std::size_t n = 1 + nerdistill::uniform_index(rng, 3);
    std::size_t tp = 0, g_total = 0, p_total = 0;
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t len = 1 + nerdistill::uniform_index(rng, 6);
      nc::LabeledUtterance g;
      g.id = "u" + std::to_string(u);
      for (std::size_t k = 0; k < len; ++k) g.tokens.push_back("t");
      nc::LabeledUtterance p = g;
      g.tags = nc::bio_encode(nt::random_spans(rng, len), len);
      std::vector<nc::Tag> ptags;
      for (std::size_t k = 0; k < len; ++k) {
        // Mostly copy gold, sometimes anything at all.
        ptags.push_back(nerdistill::bernoulli(rng, 0.6)
                            ? (*g.tags)[k]
                            : nc::Tag::from_index(
                                  static_cast<int>(nerdistill::uniform_index(rng, nc::Tag::kNumClasses))));
      }
      p.tags = ptags;
      // Exhaustive matcher: every gold span against every predicted span.
      const auto gs = nt::reference_decode(nt::tag_names(*g.tags));
      const auto ps = nt::reference_decode(nt::tag_names(*p.tags));
      for (const auto& a : gs) {
        for (const auto& b : ps) tp += (a == b);
      }
      g_total += gs.size();
      p_total += ps.size();
      gold.push_back(std::move(g));
      pred.push_back(std::move(p));
    }
    const auto r = ne::score(gold, pred);
    if (r.micro.true_positives != tp || r.micro.false_positives != p_total - tp ||
        r.micro.false_negatives != g_total - tp) {
      ++mismatches;
    }
  }
  return {mismatches == 0, fmt::format("{} random pairs, {} count mismatches", kF1Pairs, mismatches)};
}

// Benchmark runs -------------------------------------------------------------

nd::PipelineRun benchmark_run(std::uint64_t seed, bool bench) {
  nerdistill::cli::Overrides ov;
  ov.seed = seed;
  const auto rc = nerdistill::cli::load_run_config(benchmark_config(), ov);
  auto cfg = rc.pipeline;
  cfg.bench.enabled = bench;
  return nd::run_pipeline(cfg, rc.load_inputs());
}

// 5 -------------------------------------------------------------------------

Verdict table_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  double teacher = 0, dtft = 0, ft = 0;
  std::string per_seed;
  for (int s = 1; s <= kOrderingSeeds; ++s) {
    const auto run = benchmark_run(static_cast<std::uint64_t>(s), false);
    const double t = 100.0 * run.report.row(ne::kTeacherName).test.micro_f1();
    const double d = 100.0 * run.report.row(ne::kStudentDtftName).test.micro_f1();
    const double f = 100.0 * run.report.row(ne::kStudentFtName).test.micro_f1();
    std::printf("  seed %d: teacher %.2f  student_dtft %.2f  student_ft %.2f\n", s, t, d, f);
    std::fflush(stdout);
    teacher += t / kOrderingSeeds;
    dtft += d / kOrderingSeeds;
    ft += f / kOrderingSeeds;
  }
  const double secs = seconds_since(t0);
  const bool a = teacher >= dtft;
  const bool b = dtft >= ft - kOrderingMargin;
  const bool c = dtft - ft > 0;
  const bool budget = secs < kOrderingBudgetSec;
  return {a && b && c && budget,
          fmt::format("means teacher {:.2f}, student_dtft {:.2f}, student_ft {:.2f}; "
                      "teacher>=dtft {}, dtft>=ft-{:.1f} {}, dtft>ft {}; {:.0f}s",
                      teacher, dtft, ft, a ? "yes" : "NO", kOrderingMargin, b ? "yes" : "NO",
                      c ? "yes" : "NO", secs)};
}

// 6 -------------------------------------------------------------------------

Verdict compression() {
  const auto run = benchmark_run(1, true);
  if (!run.bench) return {false, "bench was not run"};
  const auto& b = *run.bench;
  const double ratio = static_cast<double>(b.teacher.latency.param_count) /
                       static_cast<double>(b.student.latency.param_count);
  const bool faster = b.student.latency.mean_us < b.teacher.latency.mean_us;
  return {ratio >= kRatioLo && ratio <= kRatioHi && faster,
          fmt::format("params {} / {} = {:.2f}; mean latency {:.1f} us vs {:.1f} us "
                      "(speedup {:.2f}x)",
                      b.teacher.latency.param_count, b.student.latency.param_count, ratio,
                      b.teacher.latency.mean_us, b.student.latency.mean_us,
                      b.teacher.latency.mean_us / b.student.latency.mean_us)};
}

// 7 -------------------------------------------------------------------------

Verdict fixture_arithmetic() {
  const auto retention = ne::retention_percent(85.29, 86.07);
  const auto speedup = ne::speedup_factor(2980.0, 40.0);
  const bool values = retention && speedup &&
                      std::abs(*retention - 8529.0 / 86.07) < 1e-9 && *speedup == 74.5;
  const std::string r = ne::format_ratio(retention, "%");
  const std::string s = ne::format_ratio(speedup, "x");

  // The same numbers through the bench report path.
  auto record = [](double ms) {
    nb::LatencyRecord l;
    l.corpus_id = "fixture";
    l.hardware = "fixture";
    l.samples_us.assign(30, ms * 1000.0);
    nb::summarize(l);
    return l;
  };
  const auto rep = nb::report(record(2980.0), record(40.0), 0.8607, 0.8529);
  const std::string text = rep.to_text();
  const bool rendered = text.find("speedup: 74.50x") != std::string::npos &&
                        text.find("retention: 99.09%") != std::string::npos;
  return {values && r == "99.09%" && s == "74.50x" && rendered,
          fmt::format("retention {}, speedup {}", r, s)};
}

// 8 -------------------------------------------------------------------------

Verdict densification() {
  const auto rc = nerdistill::cli::load_run_config(benchmark_config());
  const auto inputs = rc.load_inputs();
  const auto& c = rc.pipeline.corpus;
  nc::GeneratorOptions opts;
  opts.entity_fraction = c.entity_fraction;
  const auto split =
      nc::generate_corpus(inputs.gazetteers, inputs.templates, c.count, c.noise, c.seed, opts);
  const auto pool = nd::build_pool(rc.pipeline, inputs, split);
  const double raw = pool.raw_stats.positive_fraction();
  const double acc = pool.accepted_stats.positive_fraction();
  return {acc > raw, fmt::format("positive share {:.4f} raw -> {:.4f} accepted; {} of {} "
                                 "accepted (rate {:.3f})",
                                 raw, acc, pool.sample.accepted.size(), pool.sample.raw_count,
                                 pool.sample.acceptance_rate())};
}

// 9 -------------------------------------------------------------------------

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nerdistill");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int rc = nerdistill::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (rc != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return rc;
}

Verdict determinism() {
  const auto root = fs::temp_directory_path() / "nerdistill_acceptance_determinism";
  fs::remove_all(root);
  const auto a = root / "first", b = root / "second";
  if (cli({"-c", benchmark_config().string(), "--out-dir", a.string(), "pipeline"}) != 0) {
    return {false, "first pipeline run failed"};
  }
  // Second run only sees what the first one recorded.
  const auto recorded = root / "recorded_config.json";
  fs::copy_file(a / nerdistill::cli::artifacts::kResolvedConfig, recorded);
  if (cli({"-c", recorded.string(), "--out-dir", b.string(), "pipeline"}) != 0) {
    return {false, "rerun from the recorded config failed"};
  }
  std::vector<fs::path> compared;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    const std::string name = rel.generic_string();
    // Timing outputs differ run to run by nature.
    if (name.rfind("bench", 0) == 0 || name.rfind("comparison", 0) == 0) continue;
    compared.push_back(rel);
  }
  std::size_t differ = 0, ckpts = 0;
  std::string first_diff;
  for (const auto& rel : compared) {
    if (rel.extension() == ".ckpt") ++ckpts;
    if (!fs::exists(b / rel) || slurp(a / rel) != slurp(b / rel)) {
      if (differ++ == 0) first_diff = rel.generic_string();
    }
  }
  const bool has_report = fs::exists(a / nerdistill::cli::artifacts::kPipelineReport);
  fs::remove_all(root);
  return {differ == 0 && ckpts == 4 && has_report,
          fmt::format("{} files compared ({} checkpoints, pipeline report {}), {} differ{}",
                      compared.size(), ckpts, has_report ? "present" : "MISSING", differ,
                      differ ? " (first: " + first_diff + ")" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Verdict()>>> criteria = {
      {1, {"gradient oracle", gradient_oracle}},
      {2, {"loss closed forms", loss_closed_forms}},
      {3, {"BIO codec", bio_codec}},
      {4, {"F1 oracle", f1_oracle}},
      {5, {"teacher/student ordering", table_ordering}},
      {6, {"compression ratio and latency", compression}},
      {7, {"retention/speedup arithmetic", fixture_arithmetic}},
      {8, {"filter densification", densification}},
      {9, {"pipeline determinism", determinism}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [k, v] : criteria) selected.push_back(k);
  }
  bool all = true;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    Verdict v;
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", k, it->second.first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
