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

#include "nerdistill/corpus/corpus_io.h"

#include <fstream>

#include "json.hpp"
#include "nerdistill/error.h"

namespace nerdistill::corpus {

using nlohmann::ordered_json;

LabeledUtterance parse_record(const std::string& line,
                              const ReadOptions& options) {
  ordered_json record;
  try {
    record = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!record.is_object()) throw ValidationError("record is not an object");
  LabeledUtterance u;
  auto id = record.find("id");
  if (id == record.end() || !id->is_string()) {
    throw ValidationError("missing string field \"id\"");
  }
  u.id = id->get<std::string>();
  auto tokens = record.find("tokens");
  if (tokens == record.end() || !tokens->is_array()) {
    throw ValidationError("missing array field \"tokens\"");
  }
  for (const auto& t : *tokens) {
    if (!t.is_string()) throw ValidationError("non-string token");
    u.tokens.push_back(t.get<std::string>());
  }
  auto tags = record.find("tags");
  if (tags != record.end() && !tags->is_null()) {
    if (!tags->is_array()) throw ValidationError("\"tags\" is not an array");
    u.tags.emplace();
    for (const auto& t : *tags) {
      if (!t.is_string()) throw ValidationError("non-string tag");
      const std::string name = t.get<std::string>();
      auto tag = Tag::parse(name);
      if (!tag) throw ValidationError("unknown tag '" + name + "'");
      u.tags->push_back(*tag);
    }
  }
  validate_utterance(u, options.require_bio_valid);
  return u;
}

std::string format_record(const LabeledUtterance& utterance) {
  ordered_json record;
  record["id"] = utterance.id;
  record["tokens"] = utterance.tokens;
  if (utterance.tags) {
    ordered_json tags = ordered_json::array();
    for (Tag tag : *utterance.tags) tags.push_back(std::string(tag.name()));
    record["tags"] = std::move(tags);
  }
  return record.dump();
}

std::vector<LabeledUtterance> read_jsonl(const std::filesystem::path& path,
                                         const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<LabeledUtterance> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_record(line, options));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(std::span<const LabeledUtterance> utterances,
                 const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const LabeledUtterance& u : utterances) out << format_record(u) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& path,
                                    bool skip_comments) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    const auto last = line.find_last_not_of(" \t\r\n");
    if (last == std::string::npos) continue;
    line.erase(last + 1);
    const auto first = line.find_first_not_of(" \t");
    line.erase(0, first);
    if (skip_comments && line.front() == '#') continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

Gazetteers read_gazetteers(
    const std::map<EntityType, std::filesystem::path>& files) {
  Gazetteers gazetteers;
  for (const auto& [type, path] : files) gazetteers[type] = read_lines(path);
  return gazetteers;
}

std::vector<std::string> read_templates(const std::filesystem::path& path) {
  return read_lines(path, /*skip_comments=*/true);
}

}  // namespace nerdistill::corpus
