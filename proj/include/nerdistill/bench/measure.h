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

#ifndef NERDISTILL_BENCH_MEASURE_H_
#define NERDISTILL_BENCH_MEASURE_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nerdistill/corpus/utterance.h"
#include "nerdistill/tagger/model.h"

namespace nerdistill::bench {

inline constexpr int kMinIterations = 30;

// Per-utterance latency summary. Everything except `samples_us` is derived
// from the samples or copied from the inputs, see summarize().
struct LatencyRecord {
  std::string model_id;
  std::string corpus_id;
  std::string hardware;
  std::size_t param_count = 0;
  int warmup = 0;
  int iterations = 0;
  std::vector<double> samples_us;
  double mean_us = 0.0;
  double median_us = 0.0;
  double p95_us = 0.0;

  double mean_ms() const { return mean_us / 1000.0; }
};

// Fills mean, median (midpoint for even counts) and nearest-rank p95 from
// record.samples_us. Throws ConfigError with fewer than kMinIterations
// samples.
void summarize(LatencyRecord& record);

// Hash of ids and tokens; two records are comparable only if these agree.
std::string corpus_fingerprint(std::span<const corpus::LabeledUtterance> corpus);

// CPU model string from /proc/cpuinfo (or "unknown"), plus core count.
std::string hardware_descriptor();

// `warmup` unrecorded predictions, then `iters` timed single-utterance
// predictions cycling through the corpus, on the calling thread with
// steady_clock. Throws ConfigError when iters < kMinIterations or
// warmup < 0, ValidationError on an empty corpus.
LatencyRecord measure(const tagger::TaggerModel& model,
                      std::span<const corpus::LabeledUtterance> corpus, int warmup,
                      int iters);

nlohmann::ordered_json to_json(const LatencyRecord& record, bool with_samples = false);

// CSV with header "iteration,microseconds".
void write_samples_csv(const LatencyRecord& record, const std::filesystem::path& path);
std::vector<double> read_samples_csv(const std::filesystem::path& path);

}  // namespace nerdistill::bench

#endif  // NERDISTILL_BENCH_MEASURE_H_
