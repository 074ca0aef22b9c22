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

#ifndef NERDISTILL_BENCH_REPORT_H_
#define NERDISTILL_BENCH_REPORT_H_

#include <optional>
#include <string>

#include "json.hpp"
#include "nerdistill/bench/measure.h"
#include "nerdistill/eval/score.h"

namespace nerdistill::bench {

struct BenchEntry {
  std::string name;
  LatencyRecord latency;
  double f1 = 0.0;  // micro F1 in [0, 1]
};

struct BenchReport {
  BenchEntry teacher;
  BenchEntry student;
  std::string hardware;
  std::optional<double> speedup;    // teacher mean / student mean
  std::optional<double> retention;  // 100 * student F1 / teacher F1

  // Full precision numbers; samples are left to the CSV files.
  nlohmann::ordered_json to_json() const;
  // Two-decimal rendering, "n/a" where undefined.
  std::string to_text() const;
};

// Throws ValidationError when the two records were measured on different
// corpora or different machines.
BenchReport report(const LatencyRecord& teacher, const LatencyRecord& student,
                   double teacher_f1, double student_f1,
                   std::string teacher_name = "teacher",
                   std::string student_name = "student_dtft");

BenchReport report(const LatencyRecord& teacher, const LatencyRecord& student,
                   const eval::EvalResult& teacher_eval, const eval::EvalResult& student_eval,
                   std::string teacher_name = "teacher",
                   std::string student_name = "student_dtft");

}  // namespace nerdistill::bench

#endif  // NERDISTILL_BENCH_REPORT_H_
