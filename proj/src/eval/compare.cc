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

#include "nerdistill/eval/compare.h"

#include <algorithm>
#include <array>
#include <fmt/format.h>

namespace nerdistill::eval {
namespace {

int pipeline_rank(std::string_view name) {
  if (name == kTeacherName) return 0;
  if (name == kStudentFtName) return 1;
  if (name == kStudentDtftName) return 2;
  return 3;
}

std::vector<std::array<std::string, 5>> cells(const ComparisonTable& table, bool percent) {
  std::vector<std::array<std::string, 5>> out;
  for (const ComparisonRow& r : table.rows) {
    std::array<std::string, 5> c;
    c[0] = r.model;
    c[1] = fmt::format("{:.2f}", r.f1 * 100.0);
    c[2] = r.latency_ms ? fmt::format("{:.3f}", *r.latency_ms) : "";
    if (r.relative) {
      c[3] = r.retention ? format_ratio(r.retention, percent ? "%" : "")
                         : (r.model == kTeacherName ? "" : "n/a");
      c[4] = r.speedup ? format_ratio(r.speedup, percent ? "x" : "")
                       : (r.model == kTeacherName || !r.latency_ms ? "" : "n/a");
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::optional<double> retention_percent(double student_f1, double teacher_f1) {
  if (!(teacher_f1 > 0.0)) return std::nullopt;
  return 100.0 * student_f1 / teacher_f1;
}

std::optional<double> speedup_factor(double teacher_latency, double student_latency) {
  if (!(teacher_latency > 0.0) || !(student_latency > 0.0)) return std::nullopt;
  return teacher_latency / student_latency;
}

std::string format_ratio(std::optional<double> value, std::string_view suffix) {
  if (!value) return "n/a";
  return fmt::format("{:.2f}{}", *value, suffix);
}

bool ComparisonTable::has_relative_columns() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const ComparisonRow& r) { return r.relative; });
}

std::string ComparisonTable::to_text() const {
  const bool rel = has_relative_columns();
  const std::size_t ncol = rel ? 5 : 3;
  const std::array<std::string, 5> header = {"model", "f1", "latency_ms", "retention",
                                             "speedup"};
  auto body = cells(*this, true);
  std::array<std::size_t, 5> width{};
  for (std::size_t c = 0; c < ncol; ++c) {
    width[c] = header[c].size();
    for (const auto& row : body) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  auto emit = [&](const std::array<std::string, 5>& row) {
    std::string line;
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c == 0) {
        line += fmt::format("{:<{}}", row[c], width[c]);
      } else {
        line += fmt::format("  {:>{}}", row[c], width[c]);
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  };
  emit(header);
  for (const auto& row : body) emit(row);
  return out;
}

std::string ComparisonTable::to_csv() const {
  const bool rel = has_relative_columns();
  std::string out = rel ? "model,f1,latency_ms,retention_pct,speedup\n"
                        : "model,f1,latency_ms\n";
  for (const auto& row : cells(*this, false)) {
    out += row[0] + "," + row[1] + "," + row[2];
    if (rel) out += "," + row[3] + "," + row[4];
    out += "\n";
  }
  return out;
}

ComparisonTable compare_f1(const std::map<std::string, double>& f1,
                           const std::map<std::string, double>& latencies_ms) {
  ComparisonTable table;
  for (const auto& [name, value] : f1) {
    ComparisonRow row;
    row.model = name;
    row.f1 = value;
    if (auto it = latencies_ms.find(name); it != latencies_ms.end()) row.latency_ms = it->second;
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return pipeline_rank(a.model) < pipeline_rank(b.model);
                   });
  const auto teacher = std::find_if(table.rows.begin(), table.rows.end(),
                                    [](const ComparisonRow& r) { return r.model == kTeacherName; });
  if (table.rows.size() < 2 || teacher == table.rows.end()) return table;
  const ComparisonRow ref = *teacher;
  for (ComparisonRow& row : table.rows) {
    row.relative = true;
    if (row.model == kTeacherName) continue;
    row.retention = retention_percent(row.f1, ref.f1);
    if (row.latency_ms && ref.latency_ms) {
      row.speedup = speedup_factor(*ref.latency_ms, *row.latency_ms);
    }
  }
  return table;
}

ComparisonTable compare(const std::map<std::string, EvalResult>& results,
                        const std::map<std::string, double>& latencies_ms) {
  std::map<std::string, double> f1;
  for (const auto& [name, r] : results) f1[name] = r.micro_f1();
  return compare_f1(f1, latencies_ms);
}

}  // namespace nerdistill::eval
