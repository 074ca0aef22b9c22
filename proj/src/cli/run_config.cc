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

#include "nerdistill/cli/run_config.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include "nerdistill/corpus/corpus_io.h"
#include "nerdistill/error.h"
#include "nerdistill/hash.h"

namespace nerdistill::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::string path_string(const Json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("invalid value for config key '" + key + "'");
  return j.get<std::string>();
}

void read_type_paths(const Json& j, const std::string& key, const fs::path& base,
                     std::map<corpus::EntityType, fs::path>& out) {
  if (!j.is_object()) throw ConfigError("config key '" + key + "' must be an object");
  for (const auto& item : j.items()) {
    const auto type = corpus::parse_entity_type(item.key());
    if (!type) throw ConfigError("unknown config key '" + key + "." + item.key() + "'");
    out[*type] = resolve(base, path_string(item.value(), key + "." + item.key()));
  }
}

void require_file(const fs::path& p, const std::string& key) {
  if (!fs::is_regular_file(p)) {
    throw IoError("config key '" + key + "' points to a missing file: " + p.string());
  }
}

}  // namespace

fs::path default_data_dir() { return NERDISTILL_DATA_DIR; }

Json RunConfig::provenance() const { return {{"config_hash", hash}, {"config", resolved}}; }

distill::PipelineInputs RunConfig::load_inputs() const {
  distill::PipelineInputs in;
  in.gazetteers = corpus::read_gazetteers(paths.gazetteers);
  in.filter_gazetteers = corpus::read_gazetteers(paths.filter_gazetteers);
  in.templates = corpus::read_templates(paths.templates);
  return in;
}

RunConfig run_config_from_json(const Json& j, const fs::path& base_dir, const Overrides& overrides) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig rc;
  const fs::path data = default_data_dir();
  for (auto type : corpus::kEntityTypes) {
    const std::string file = lower(corpus::entity_type_name(type)) + ".txt";
    rc.paths.gazetteers[type] = data / "gazetteers" / file;
    rc.paths.filter_gazetteers[type] = data / "filter" / file;
  }
  rc.paths.templates = data / "templates.txt";
  rc.paths.out_dir = fs::current_path() / "nerdistill-out";

  // A recorded echo ({"config_hash", "config"}) is accepted as input; its
  // data fingerprints must still match the files on disk.
  Json pipeline_part = j;
  std::optional<Json> recorded_data;
  std::optional<std::string> recorded_hash;
  if (j.contains("config_hash") && j.contains("config")) {
    if (!j.at("config_hash").is_string() || !j.at("config").is_object()) {
      throw ConfigError("recorded config needs a string 'config_hash' and an object 'config'");
    }
    recorded_hash = j.at("config_hash").get<std::string>();
    pipeline_part = j.at("config");
    if (pipeline_part.contains("data")) {
      recorded_data = pipeline_part.at("data");
      pipeline_part.erase("data");
    }
    for (const auto& item : j.items()) {
      if (item.key() != "config_hash" && item.key() != "config" && item.key() != "paths") {
        throw ConfigError("unknown config key '" + item.key() + "'");
      }
    }
    if (j.contains("paths")) pipeline_part["paths"] = j.at("paths");
  }
  if (pipeline_part.contains("paths")) {
    const Json p = pipeline_part.at("paths");
    if (!p.is_object()) throw ConfigError("config key 'paths' must be an object");
    for (const auto& item : p.items()) {
      const std::string& k = item.key();
      if (k == "gazetteers") {
        read_type_paths(item.value(), "paths.gazetteers", base_dir, rc.paths.gazetteers);
      } else if (k == "filter_gazetteers") {
        read_type_paths(item.value(), "paths.filter_gazetteers", base_dir,
                        rc.paths.filter_gazetteers);
      } else if (k == "templates") {
        rc.paths.templates = resolve(base_dir, path_string(item.value(), "paths.templates"));
      } else if (k == "out_dir") {
        rc.paths.out_dir = resolve(base_dir, path_string(item.value(), "paths.out_dir"));
      } else {
        throw ConfigError("unknown config key 'paths." + k + "'");
      }
    }
    pipeline_part.erase("paths");
  }
  if (overrides.out_dir) rc.paths.out_dir = fs::absolute(*overrides.out_dir).lexically_normal();
  rc.pipeline = distill::pipeline_config_from_json(pipeline_part, overrides.seed);

  for (const auto& [type, p] : rc.paths.gazetteers) {
    require_file(p, "paths.gazetteers." + std::string(corpus::entity_type_name(type)));
  }
  for (const auto& [type, p] : rc.paths.filter_gazetteers) {
    require_file(p, "paths.filter_gazetteers." + std::string(corpus::entity_type_name(type)));
  }
  require_file(rc.paths.templates, "paths.templates");

  Json pipeline_json = distill::to_json(rc.pipeline);
  std::uint64_t h = fnv1a64(pipeline_json.dump());
  Json data_hashes = Json::object();
  auto add_file = [&](const std::string& name, const fs::path& p) {
    const std::string fp = hex64(fnv1a64(slurp(p)));
    data_hashes[name] = fp;
    h = fnv1a64(name + "=" + fp + ";", h);
  };
  for (const auto& [type, p] : rc.paths.gazetteers) {
    add_file("gazetteers." + std::string(corpus::entity_type_name(type)), p);
  }
  for (const auto& [type, p] : rc.paths.filter_gazetteers) {
    add_file("filter_gazetteers." + std::string(corpus::entity_type_name(type)), p);
  }
  add_file("templates", rc.paths.templates);
  rc.hash = hex64(h);
  if (recorded_data && *recorded_data != data_hashes) {
    for (const auto& item : data_hashes.items()) {
      if (!recorded_data->contains(item.key()) || (*recorded_data)[item.key()] != item.value()) {
        throw ConfigError("data file '" + item.key() + "' differs from the recorded fingerprint");
      }
    }
    throw ConfigError("recorded data fingerprints do not match the data files");
  }
  if (recorded_hash && !overrides.seed && *recorded_hash != rc.hash) {
    throw ConfigError("recorded config_hash " + *recorded_hash + " does not match the config (" +
                      rc.hash + ")");
  }

  // Data files enter the echo by content fingerprint, not by location, so
  // the echo (and everything embedding it) does not depend on where the
  // checkout lives.
  rc.resolved = pipeline_json;
  rc.resolved["data"] = data_hashes;
  return rc;
}

RunConfig load_run_config(const fs::path& file, const Overrides& overrides) {
  if (!fs::is_regular_file(file)) throw IoError("config file not found: " + file.string());
  Json j;
  try {
    j = Json::parse(slurp(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string() + ": not valid JSON: " + e.what());
  }
  RunConfig rc = run_config_from_json(j, fs::absolute(file).parent_path(), overrides);
  rc.source = fs::absolute(file).lexically_normal();
  return rc;
}

}  // namespace nerdistill::cli
