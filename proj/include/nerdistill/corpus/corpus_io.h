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

#ifndef NERDISTILL_CORPUS_CORPUS_IO_H_
#define NERDISTILL_CORPUS_CORPUS_IO_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nerdistill/corpus/generator.h"
#include "nerdistill/corpus/utterance.h"

namespace nerdistill::corpus {

struct ReadOptions {
  // Model predictions may be BIO-invalid; gold files must not be.
  bool require_bio_valid = true;
};

// One JSON object per line: {"id": ..., "tokens": [...], "tags": [...]}.
// "tags" is optional. Errors carry "<path>:<line>:".
std::vector<LabeledUtterance> read_jsonl(const std::filesystem::path& path,
                                         const ReadOptions& options = {});
void write_jsonl(std::span<const LabeledUtterance> utterances,
                 const std::filesystem::path& path);

// Parses a single record; throws ValidationError without location info.
LabeledUtterance parse_record(const std::string& line,
                              const ReadOptions& options = {});
std::string format_record(const LabeledUtterance& utterance);

// Non-blank lines, trailing whitespace trimmed. Lines starting with '#' are
// skipped when skip_comments is set.
std::vector<std::string> read_lines(const std::filesystem::path& path,
                                    bool skip_comments = false);

// One file per entity type, one entry per line.
Gazetteers read_gazetteers(
    const std::map<EntityType, std::filesystem::path>& files);

std::vector<std::string> read_templates(const std::filesystem::path& path);

}  // namespace nerdistill::corpus

#endif  // NERDISTILL_CORPUS_CORPUS_IO_H_
