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

#ifndef NERDISTILL_EVAL_COMPARE_H_
#define NERDISTILL_EVAL_COMPARE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nerdistill/eval/score.h"

namespace nerdistill::eval {

// Canonical model names, in the order rows are rendered.
inline constexpr std::string_view kTeacherName = "teacher";
inline constexpr std::string_view kStudentFtName = "student_ft";
inline constexpr std::string_view kStudentDtftName = "student_dtft";

// 100 * student / teacher, or nullopt when teacher_f1 is 0.
std::optional<double> retention_percent(double student_f1, double teacher_f1);
// teacher / student, or nullopt unless both are positive.
std::optional<double> speedup_factor(double teacher_latency, double student_latency);

// "n/a" for nullopt, otherwise fixed with two decimals plus the suffix.
std::string format_ratio(std::optional<double> value, std::string_view suffix);

struct ComparisonRow {
  std::string model;
  double f1 = 0.0;  // micro F1 in [0, 1]
  std::optional<double> latency_ms;
  // Relative to the teacher row; absent on the teacher row itself and
  // whenever there is no teacher row to compare against.
  std::optional<double> retention;
  std::optional<double> speedup;
  bool relative = false;  // true when retention/speedup columns apply
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  bool has_relative_columns() const;
  std::string to_text() const;
  std::string to_csv() const;
};

// Rows follow teacher, student_ft, student_dtft, then any other names in
// lexicographic order. Latencies are per-utterance means in milliseconds;
// models missing from `latencies_ms` get an empty latency cell.
ComparisonTable compare(const std::map<std::string, EvalResult>& results,
                        const std::map<std::string, double>& latencies_ms);

// Same, from F1 values directly (fixtures, reports loaded from disk).
ComparisonTable compare_f1(const std::map<std::string, double>& f1,
                           const std::map<std::string, double>& latencies_ms);

}  // namespace nerdistill::eval

#endif  // NERDISTILL_EVAL_COMPARE_H_
