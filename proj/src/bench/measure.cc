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

#include "nerdistill/bench/measure.h"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numeric>
#include <thread>

#include "nerdistill/error.h"
#include "nerdistill/hash.h"
#include "nerdistill/tagger/checkpoint.h"

namespace nerdistill::bench {

void summarize(LatencyRecord& record) {
  const auto& s = record.samples_us;
  if (s.size() < static_cast<std::size_t>(kMinIterations)) {
    throw ConfigError("latency summary needs at least " + std::to_string(kMinIterations) +
                      " samples, got " + std::to_string(s.size()));
  }
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  record.iterations = static_cast<int>(n);
  record.mean_us = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
  record.median_us = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  record.p95_us = sorted[std::max<std::size_t>(rank, 1) - 1];
}

std::string corpus_fingerprint(std::span<const corpus::LabeledUtterance> corpus) {
  std::uint64_t h = fnv1a64("corpus");
  for (const auto& u : corpus) {
    h = fnv1a64(u.id, h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
    for (const auto& t : u.tokens) {
      h = fnv1a64(t, h);
      h = fnv1a64(std::string_view("\x1e", 1), h);
    }
    h = fnv1a64(std::string_view("\x1d", 1), h);
  }
  return hex64(h);
}

std::string hardware_descriptor() {
  std::string cpu = "unknown";
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      if (auto colon = line.find(':'); colon != std::string::npos) {
        cpu = line.substr(colon + 1);
        cpu.erase(0, cpu.find_first_not_of(" \t"));
      }
      break;
    }
  }
  return fmt::format("{}; {} hardware threads; measured on 1 thread", cpu,
                     std::thread::hardware_concurrency());
}

LatencyRecord measure(const tagger::TaggerModel& model,
                      std::span<const corpus::LabeledUtterance> corpus, int warmup,
                      int iters) {
  if (iters < kMinIterations) {
    throw ConfigError("bench iterations must be >= " + std::to_string(kMinIterations) +
                      ", got " + std::to_string(iters));
  }
  if (warmup < 0) throw ConfigError("bench warmup must be >= 0");
  if (corpus.empty()) throw ValidationError("bench corpus is empty");
  // Eigen only parallelizes under OpenMP; pin it anyway and refuse to time
  // if something else changed it.
  Eigen::setNbThreads(1);
  if (Eigen::nbThreads() != 1) {
    throw ConfigError("model parallelism is active during timing");
  }

  LatencyRecord record;
  record.model_id = tagger::model_id(model);
  record.corpus_id = corpus_fingerprint(corpus);
  record.hardware = hardware_descriptor();
  record.param_count = tagger::param_count(model);
  record.warmup = warmup;

  for (int i = 0; i < warmup; ++i) {
    tagger::predict(model, corpus[static_cast<std::size_t>(i) % corpus.size()]);
  }
  using Clock = std::chrono::steady_clock;
  static_assert(Clock::is_steady);
  record.samples_us.reserve(static_cast<std::size_t>(iters));
  for (int i = 0; i < iters; ++i) {
    const auto& u = corpus[static_cast<std::size_t>(i) % corpus.size()];
    const auto t0 = Clock::now();
    const auto tags = tagger::predict(model, u);
    const auto t1 = Clock::now();
    record.samples_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  summarize(record);
  return record;
}

nlohmann::ordered_json to_json(const LatencyRecord& record, bool with_samples) {
  nlohmann::ordered_json j;
  j["model_id"] = record.model_id;
  j["corpus_id"] = record.corpus_id;
  j["param_count"] = record.param_count;
  j["warmup"] = record.warmup;
  j["iterations"] = record.iterations;
  j["mean_us"] = record.mean_us;
  j["median_us"] = record.median_us;
  j["p95_us"] = record.p95_us;
  j["hardware"] = record.hardware;
  if (with_samples) j["samples_us"] = record.samples_us;
  return j;
}

void write_samples_csv(const LatencyRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iteration,microseconds\n";
  for (std::size_t i = 0; i < record.samples_us.size(); ++i) {
    out << fmt::format("{},{}\n", i, record.samples_us[i]);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<double> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "iteration,microseconds") {
    throw FormatError(path.string() + ": missing samples header");
  }
  std::vector<double> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError(path.string() + ": bad row '" + line + "'");
    try {
      samples.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad row '" + line + "'");
    }
  }
  return samples;
}

}  // namespace nerdistill::bench
