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

#ifndef NERDISTILL_CORPUS_TAGS_H_
#define NERDISTILL_CORPUS_TAGS_H_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nerdistill::corpus {

enum class EntityType : std::uint8_t { kPerson = 0, kProdOrg = 1, kLocation = 2 };

inline constexpr std::array<EntityType, 3> kEntityTypes = {
    EntityType::kPerson, EntityType::kProdOrg, EntityType::kLocation};
inline constexpr std::size_t kNumEntityTypes = kEntityTypes.size();

// "PERSON", "PRODORG", "LOCATION".
std::string_view entity_type_name(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view name);

// One BIO2 tag. Class indices are fixed: O = 0, then a B/I pair per entity
// type in declaration order (B-PERSON = 1, I-PERSON = 2, B-PRODORG = 3,
// I-PRODORG = 4, B-LOCATION = 5, I-LOCATION = 6).
class Tag {
 public:
  static constexpr int kNumClasses = 1 + 2 * static_cast<int>(kNumEntityTypes);

  constexpr Tag() = default;

  static constexpr Tag outside() { return Tag(0); }
  static constexpr Tag begin(EntityType type) {
    return Tag(static_cast<std::uint8_t>(1 + 2 * static_cast<int>(type)));
  }
  static constexpr Tag inside(EntityType type) {
    return Tag(static_cast<std::uint8_t>(2 + 2 * static_cast<int>(type)));
  }
  // Throws ValidationError for indices outside [0, kNumClasses).
  static Tag from_index(int index);
  static std::optional<Tag> parse(std::string_view name);

  constexpr int index() const { return index_; }
  constexpr bool is_outside() const { return index_ == 0; }
  constexpr bool is_begin() const { return index_ != 0 && index_ % 2 == 1; }
  constexpr bool is_inside() const { return index_ != 0 && index_ % 2 == 0; }
  // Only meaningful when !is_outside().
  constexpr EntityType type() const {
    return static_cast<EntityType>((index_ - 1) / 2);
  }
  std::string_view name() const;

  constexpr auto operator<=>(const Tag&) const = default;

 private:
  constexpr explicit Tag(std::uint8_t index) : index_(index) {}
  std::uint8_t index_ = 0;
};

// Half-open token span [start, end).
struct EntitySpan {
  EntityType type = EntityType::kPerson;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const EntitySpan&) const = default;
};

// Throws ValidationError if spans are empty, overlap, or exceed length.
std::vector<Tag> bio_encode(std::span<const EntitySpan> spans,
                            std::size_t length);

// Total: accepts any tag sequence. A stray I-X (after O, or after a span of
// a different type) opens a new span as if it were B-X.
std::vector<EntitySpan> bio_decode(std::span<const Tag> tags);

// True iff no I-X follows anything other than B-X or I-X.
bool is_bio_valid(std::span<const Tag> tags);

// bio_encode(bio_decode(tags)): the canonical valid sequence with the same
// decoded spans.
std::vector<Tag> bio_repair(std::span<const Tag> tags);

}  // namespace nerdistill::corpus

#endif  // NERDISTILL_CORPUS_TAGS_H_
