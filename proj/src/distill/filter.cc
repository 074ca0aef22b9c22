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

#include "nerdistill/distill/filter.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "nerdistill/error.h"

namespace nerdistill::distill {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> lower_words(const std::string& phrase) {
  std::istringstream in(phrase);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(lower(w));
  return words;
}

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

}  // namespace

void FilterConfig::validate() const {
  if (min_hits < 1) throw ConfigError("filter.min_hits must be >= 1");
}

EntityLikelihoodFilter::EntityLikelihoodFilter(const corpus::Gazetteers& gazetteers,
                                               FilterConfig config)
    : config_(config) {
  config_.validate();
  for (const auto& [type, entries] : gazetteers) {
    for (const std::string& e : entries) add_entry(type, e);
  }
}

void EntityLikelihoodFilter::add_entry(corpus::EntityType, const std::string& phrase) {
  auto words = lower_words(phrase);
  if (words.empty()) return;
  auto& bucket = phrases_[words.front()];
  if (std::find(bucket.begin(), bucket.end(), words) == bucket.end()) {
    bucket.push_back(std::move(words));
    ++entry_count_;
  }
}

bool EntityLikelihoodFilter::casing_candidate(const std::vector<std::string>& tokens,
                                              std::size_t index) {
  const std::string& tok = tokens[index];
  if (tok == "I") return false;
  const std::size_t from = index == 0 ? 1 : 0;
  return std::any_of(tok.begin() + static_cast<std::ptrdiff_t>(std::min(from, tok.size())),
                     tok.end(), is_upper);
}

std::size_t EntityLikelihoodFilter::hits(const corpus::LabeledUtterance& u) const {
  const auto& tokens = u.tokens;
  std::vector<char> covered(tokens.size(), 0);
  std::vector<std::string> low(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) low[i] = lower(tokens[i]);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (config_.use_casing && casing_candidate(tokens, i)) covered[i] = 1;
    const auto it = phrases_.find(low[i]);
    if (it == phrases_.end()) continue;
    for (const auto& phrase : it->second) {
      if (i + phrase.size() > tokens.size()) continue;
      if (std::equal(phrase.begin(), phrase.end(), low.begin() + static_cast<std::ptrdiff_t>(i))) {
        std::fill_n(covered.begin() + static_cast<std::ptrdiff_t>(i), phrase.size(), 1);
      }
    }
  }
  return static_cast<std::size_t>(std::count(covered.begin(), covered.end(), 1));
}

bool EntityLikelihoodFilter::accepts(const corpus::LabeledUtterance& u) const {
  return hits(u) >= static_cast<std::size_t>(config_.min_hits);
}

double PoolSample::acceptance_rate() const {
  return raw_count == 0 ? 0.0
                        : static_cast<double>(accepted.size()) / static_cast<double>(raw_count);
}

PoolSample sample_pool(std::span<const corpus::LabeledUtterance> raw,
                       const EntityLikelihoodFilter& filter) {
  PoolSample out;
  out.raw_count = raw.size();
  for (const auto& u : raw) {
    if (filter.accepts(u)) out.accepted.push_back(u);
  }
  return out;
}

}  // namespace nerdistill::distill
