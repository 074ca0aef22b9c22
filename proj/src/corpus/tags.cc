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

#include "nerdistill/corpus/tags.h"

#include <algorithm>
#include <string>

#include "nerdistill/error.h"

namespace nerdistill::corpus {
namespace {

constexpr std::array<std::string_view, Tag::kNumClasses> kTagNames = {
    "O",         "B-PERSON",   "I-PERSON",  "B-PRODORG",
    "I-PRODORG", "B-LOCATION", "I-LOCATION"};

}  // namespace

std::string_view entity_type_name(EntityType type) {
  switch (type) {
    case EntityType::kPerson:
      return "PERSON";
    case EntityType::kProdOrg:
      return "PRODORG";
    case EntityType::kLocation:
      return "LOCATION";
  }
  return "?";
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
  for (EntityType type : kEntityTypes) {
    if (entity_type_name(type) == name) return type;
  }
  return std::nullopt;
}

Tag Tag::from_index(int index) {
  if (index < 0 || index >= kNumClasses) {
    throw ValidationError("tag class index out of range: " +
                          std::to_string(index));
  }
  return Tag(static_cast<std::uint8_t>(index));
}

std::optional<Tag> Tag::parse(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kTagNames[i] == name) return Tag(static_cast<std::uint8_t>(i));
  }
  return std::nullopt;
}

std::string_view Tag::name() const { return kTagNames[index_]; }

std::vector<Tag> bio_encode(std::span<const EntitySpan> spans,
                            std::size_t length) {
  std::vector<EntitySpan> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const EntitySpan& a, const EntitySpan& b) {
              return a.start < b.start;
            });
  std::vector<Tag> tags(length, Tag::outside());
  std::size_t covered_until = 0;
  for (const EntitySpan& span : sorted) {
    if (span.start >= span.end || span.end > length) {
      throw ValidationError("span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) +
                            ") is empty or outside length " +
                            std::to_string(length));
    }
    if (span.start < covered_until) {
      throw ValidationError("overlapping spans at token " +
                            std::to_string(span.start));
    }
    tags[span.start] = Tag::begin(span.type);
    for (std::size_t i = span.start + 1; i < span.end; ++i) {
      tags[i] = Tag::inside(span.type);
    }
    covered_until = span.end;
  }
  return tags;
}

std::vector<EntitySpan> bio_decode(std::span<const Tag> tags) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag tag = tags[i];
    const bool continues =
        open && tag.is_inside() && tag.type() == open->type;
    if (continues) continue;
    if (open) {
      open->end = i;
      spans.push_back(*open);
      open.reset();
    }
    if (!tag.is_outside()) open = EntitySpan{tag.type(), i, i};
  }
  if (open) {
    open->end = tags.size();
    spans.push_back(*open);
  }
  return spans;
}

bool is_bio_valid(std::span<const Tag> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!tags[i].is_inside()) continue;
    if (i == 0 || tags[i - 1].is_outside() ||
        tags[i - 1].type() != tags[i].type()) {
      return false;
    }
  }
  return true;
}

std::vector<Tag> bio_repair(std::span<const Tag> tags) {
  const std::vector<EntitySpan> spans = bio_decode(tags);
  return bio_encode(spans, tags.size());
}

}  // namespace nerdistill::corpus
