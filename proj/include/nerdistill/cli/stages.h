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

#ifndef NERDISTILL_CLI_STAGES_H_
#define NERDISTILL_CLI_STAGES_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nerdistill/cli/run_config.h"

namespace nerdistill::cli {

// File names inside the output directory. run_pipeline writes the same
// layout, so single stages and the full pipeline can be mixed.
namespace artifacts {
inline constexpr const char* kTrain = "corpus/train.jsonl";
inline constexpr const char* kDev = "corpus/dev.jsonl";
inline constexpr const char* kTest = "corpus/test.jsonl";
inline constexpr const char* kPool = "pool.jsonl";
inline constexpr const char* kPoolStats = "pool_stats.json";
inline constexpr const char* kPseudo = "pseudo.jsonl";
inline constexpr const char* kTeacher = "teacher.ckpt";
inline constexpr const char* kStage1 = "student_stage1.ckpt";
inline constexpr const char* kStudentDtft = "student_dtft.ckpt";
inline constexpr const char* kStudentFt = "student_ft.ckpt";
inline constexpr const char* kEvalReport = "eval_report.json";
inline constexpr const char* kPipelineReport = "pipeline_report.json";
inline constexpr const char* kBenchReport = "bench_report.json";
inline constexpr const char* kResolvedConfig = "resolved_config.json";
}  // namespace artifacts

struct StageOptions {
  bool allow_config_mismatch = false;
};

// Throws IoError naming the expected path when a prior-stage artifact is
// missing, and ConfigError when its sidecar records a different config
// hash (unless allowed).
void require_artifact(const std::filesystem::path& path, const RunConfig& rc,
                      const StageOptions& opts);

// Full command line: subcommands plus --version, --config, --seed,
// --out-dir and --allow-config-mismatch. Returns the process exit status.
// Failures print one line "<error_class>: <message>" to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nerdistill::cli

#endif  // NERDISTILL_CLI_STAGES_H_
