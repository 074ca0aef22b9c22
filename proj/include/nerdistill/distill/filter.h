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

#ifndef NERDISTILL_DISTILL_FILTER_H_
#define NERDISTILL_DISTILL_FILTER_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nerdistill/corpus/generator.h"
#include "nerdistill/corpus/utterance.h"

namespace nerdistill::distill {

struct FilterConfig {
  bool use_casing = true;
  int min_hits = 1;

  void validate() const;  // ConfigError
  bool operator==(const FilterConfig&) const = default;
};

// Transparent stand-in for an off-the-shelf entity detector. A hit is one
// token position covered by a gazetteer phrase (case-insensitive, whole
// tokens) or flagged by the casing heuristic. Counting covered positions
// rather than matches keeps the filter monotone in the gazetteers: a new
// entry can only cover more positions.
class EntityLikelihoodFilter {
 public:
  EntityLikelihoodFilter(const corpus::Gazetteers& gazetteers, FilterConfig config);

  void add_entry(corpus::EntityType type, const std::string& phrase);

  std::size_t hits(const corpus::LabeledUtterance& u) const;
  bool accepts(const corpus::LabeledUtterance& u) const;

  const FilterConfig& config() const { return config_; }
  std::size_t entry_count() const { return entry_count_; }

  // Casing candidate: an uppercase letter anywhere but the first character
  // of the utterance ("iPhone", "McKay", mid-sentence "Denver"). The lone
  // pronoun "I" never counts.
  static bool casing_candidate(const std::vector<std::string>& tokens, std::size_t index);

 private:
  FilterConfig config_;
  // First lowercased token -> lowercased phrases starting with it.
  std::map<std::string, std::vector<std::vector<std::string>>> phrases_;
  std::size_t entry_count_ = 0;
};

struct PoolSample {
  std::vector<corpus::LabeledUtterance> accepted;
  std::size_t raw_count = 0;

  double acceptance_rate() const;
};

// Order-preserving subset of `raw` the filter accepts. The filter only reads
// tokens; tags, when present, ride along untouched.
PoolSample sample_pool(std::span<const corpus::LabeledUtterance> raw,
                       const EntityLikelihoodFilter& filter);

}  // namespace nerdistill::distill

#endif  // NERDISTILL_DISTILL_FILTER_H_
