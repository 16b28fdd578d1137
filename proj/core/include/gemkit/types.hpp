// Copyright 2026 The gemkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Domain types shared across the pipeline: entities in their three source
// shapes, candidate pairs, dataset splits and the self-training bookkeeping.

#ifndef GEMKIT_TYPES_HPP_
#define GEMKIT_TYPES_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace gemkit {

struct SemiField;

// A value inside a semi-structured record: a scalar string, a list, or a
// nested object whose fields keep their source order.
struct SemiValue {
  using List = std::vector<SemiValue>;
  using Object = std::vector<SemiField>;

  std::variant<std::string, List, Object> node;

  static SemiValue scalar(std::string s);
  static SemiValue list(List items);
  static SemiValue object(Object fields);

  bool is_scalar() const { return std::holds_alternative<std::string>(node); }
  bool is_list() const { return std::holds_alternative<List>(node); }
  bool is_object() const { return std::holds_alternative<Object>(node); }

  friend bool operator==(const SemiValue&, const SemiValue&);
};

struct SemiField {
  std::string name;
  SemiValue value;

  friend bool operator==(const SemiField&, const SemiField&) = default;
};

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

using StructuredBody = std::vector<Attribute>;
using SemiBody = std::vector<SemiField>;
struct TextBody {
  std::string text;
  friend bool operator==(const TextBody&, const TextBody&) = default;
};

struct Entity {
  std::string id;
  std::variant<StructuredBody, SemiBody, TextBody> body;

  friend bool operator==(const Entity&, const Entity&) = default;
};

// One entity table, indexed by id. Pairs refer to entities by id only.
class EntityTable {
 public:
  EntityTable() = default;
  explicit EntityTable(std::vector<Entity> entities);

  const Entity& at(const std::string& id) const;
  const Entity* find(const std::string& id) const;
  bool contains(const std::string& id) const { return find(id) != nullptr; }

  const std::vector<Entity>& entities() const { return entities_; }
  std::size_t size() const { return entities_.size(); }

 private:
  std::vector<Entity> entities_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class MatchLabel : std::uint8_t { kMismatch = 0, kMatch = 1 };

inline int to_int(MatchLabel y) { return static_cast<int>(y); }
MatchLabel label_from_int(long v);

struct CandidatePair {
  std::string left_id;
  std::string right_id;
  std::optional<MatchLabel> label;
  // Set iff the label was produced by a teacher model. Never cleared.
  bool pseudo = false;

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

enum class SplitKind { kTrainLabeled, kTrainUnlabeled, kValid, kTest };

const char* to_string(SplitKind kind);

struct DatasetSplit {
  SplitKind kind = SplitKind::kTrainLabeled;
  std::vector<CandidatePair> pairs;
};

struct ScoredPair {
  std::size_t pair_index = 0;
  // Score for y=0 and y=1.
  std::array<double, 2> class_scores{0.0, 0.0};
  std::optional<double> uncertainty;
  std::optional<double> importance;
};

struct Violation {
  enum class Code {
    kUnlabeledInEvalSplit,
    kLabeledInUnlabeledSplit,
    kPseudoWithoutLabel,
    kDuplicateInSplit,
    kPairInTwoSplits,
  };
  Code code;
  std::size_t pair_index;
  std::string message;
};

// Checks a split's own invariants. Returns one record per breach.
std::vector<Violation> validate_split(const DatasetSplit& split);

// Same checks across a family of splits, adding cross-split duplicates.
std::vector<Violation> validate_splits(const std::vector<const DatasetSplit*>& splits);

struct SelfTrainConfig {
  int iterations = 1;
  int teacher_epochs = 20;
  int student_epochs = 30;
  int prune_frequency = 8;
  double u_r = 0.1;
  double e_r = 0.2;
  int mc_passes = 10;
  std::uint64_t seed = 42;

  // Throws Error(kInvalidInput) when a field is outside its documented range.
  void validate() const;
};

// Mutable training pools owned by the self-training engine. Pruned pairs are
// retired to `pruned` instead of being discarded.
struct SelfTrainState {
  std::vector<CandidatePair> labeled;
  std::vector<CandidatePair> unlabeled;
  std::vector<CandidatePair> pruned;

  std::size_t total() const {
    return labeled.size() + unlabeled.size() + pruned.size();
  }
};

// (N_L, N_U)
std::pair<std::size_t, std::size_t> split_counts(const SelfTrainState& state);

}  // namespace gemkit

#endif  // GEMKIT_TYPES_HPP_
