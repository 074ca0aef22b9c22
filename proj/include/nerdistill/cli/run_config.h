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

#ifndef NERDISTILL_CLI_RUN_CONFIG_H_
#define NERDISTILL_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "nerdistill/corpus/tags.h"
#include "nerdistill/distill/config.h"
#include "nerdistill/distill/pipeline.h"

namespace nerdistill::cli {

struct Paths {
  std::map<corpus::EntityType, std::filesystem::path> gazetteers;
  std::map<corpus::EntityType, std::filesystem::path> filter_gazetteers;
  std::filesystem::path templates;
  std::filesystem::path out_dir;
};

struct RunConfig {
  std::filesystem::path source;  // the config file
  Paths paths;
  distill::PipelineConfig pipeline;
  // Pipeline section with defaults applied and seeds explicit, plus a
  // content fingerprint per data file under "data".
  nlohmann::ordered_json resolved;
  // FNV-1a over the resolved pipeline section and the contents of the
  // data files. The output directory does not enter the hash.
  std::string hash;

  // {"config_hash": ..., "config": resolved}
  nlohmann::ordered_json provenance() const;
  distill::PipelineInputs load_inputs() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
};

// Relative paths in the file resolve against the file's directory; a
// relative --out-dir resolves against the working directory. Input files
// must exist (IoError naming the path). Unknown keys raise ConfigError
// naming the key.
//
// Keys under "paths", with defaults:
//   gazetteers.{PERSON,PRODORG,LOCATION}  <data>/gazetteers/<type>.txt
//   filter_gazetteers.{...}               <data>/filter/<type>.txt
//   templates                             <data>/templates.txt
//   out_dir                               nerdistill-out (working directory)
// where <data> is the data directory bundled with the source tree.
//
// A recorded resolved_config.json is also accepted. Its data fingerprints
// must match the files found, and without --seed its hash must reproduce.
RunConfig load_run_config(const std::filesystem::path& file, const Overrides& overrides = {});
RunConfig run_config_from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir,
                               const Overrides& overrides = {});

std::filesystem::path default_data_dir();

}  // namespace nerdistill::cli

#endif  // NERDISTILL_CLI_RUN_CONFIG_H_
