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

#include "nerdistill/bench/report.h"

#include <fmt/format.h>

#include "nerdistill/error.h"
#include "nerdistill/eval/compare.h"

namespace nerdistill::bench {
namespace {

nlohmann::ordered_json entry_json(const BenchEntry& e) {
  nlohmann::ordered_json j;
  j["name"] = e.name;
  j["f1"] = e.f1;
  j["latency"] = to_json(e.latency);
  return j;
}

nlohmann::ordered_json opt_json(std::optional<double> v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

BenchReport report(const LatencyRecord& teacher, const LatencyRecord& student,
                   double teacher_f1, double student_f1, std::string teacher_name,
                   std::string student_name) {
  if (teacher.corpus_id != student.corpus_id) {
    throw ValidationError("bench records come from different corpora (" + teacher.corpus_id +
                          " vs " + student.corpus_id + ")");
  }
  if (teacher.hardware != student.hardware) {
    throw ValidationError("bench records come from different machines");
  }
  BenchReport r;
  r.teacher = {std::move(teacher_name), teacher, teacher_f1};
  r.student = {std::move(student_name), student, student_f1};
  r.hardware = teacher.hardware;
  r.speedup = eval::speedup_factor(teacher.mean_us, student.mean_us);
  r.retention = eval::retention_percent(student_f1, teacher_f1);
  return r;
}

BenchReport report(const LatencyRecord& teacher, const LatencyRecord& student,
                   const eval::EvalResult& teacher_eval, const eval::EvalResult& student_eval,
                   std::string teacher_name, std::string student_name) {
  return report(teacher, student, teacher_eval.micro_f1(), student_eval.micro_f1(),
                std::move(teacher_name), std::move(student_name));
}

nlohmann::ordered_json BenchReport::to_json() const {
  nlohmann::ordered_json j;
  j["hardware"] = hardware;
  j["teacher"] = entry_json(teacher);
  j["student"] = entry_json(student);
  j["speedup"] = opt_json(speedup);
  j["retention_pct"] = opt_json(retention);
  if (teacher.latency.param_count > 0 && student.latency.param_count > 0) {
    j["param_ratio"] = static_cast<double>(teacher.latency.param_count) /
                       static_cast<double>(student.latency.param_count);
  }
  return j;
}

std::string BenchReport::to_text() const {
  std::string out = fmt::format("hardware: {}\n", hardware);
  out += fmt::format("{:<14} {:>10} {:>7} {:>6} {:>12} {:>12} {:>12}\n", "model", "params",
                     "f1", "iters", "mean_us", "median_us", "p95_us");
  for (const BenchEntry* e : {&teacher, &student}) {
    out += fmt::format("{:<14} {:>10} {:>7.2f} {:>6} {:>12.1f} {:>12.1f} {:>12.1f}\n", e->name,
                       e->latency.param_count, e->f1 * 100.0, e->latency.iterations,
                       e->latency.mean_us, e->latency.median_us, e->latency.p95_us);
  }
  out += fmt::format("speedup: {}\n", eval::format_ratio(speedup, "x"));
  out += fmt::format("retention: {}\n", eval::format_ratio(retention, "%"));
  return out;
}

}  // namespace nerdistill::bench
