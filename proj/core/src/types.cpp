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

#include "gemkit/types.hpp"

#include <set>
#include <sstream>

#include "gemkit/error.hpp"

namespace gemkit {

SemiValue SemiValue::scalar(std::string s) { return SemiValue{std::move(s)}; }
SemiValue SemiValue::list(List items) { return SemiValue{std::move(items)}; }
SemiValue SemiValue::object(Object fields) { return SemiValue{std::move(fields)}; }

bool operator==(const SemiValue& a, const SemiValue& b) { return a.node == b.node; }

EntityTable::EntityTable(std::vector<Entity> entities) : entities_(std::move(entities)) {
  index_.reserve(entities_.size());
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    auto [it, inserted] = index_.emplace(entities_[i].id, i);
    if (!inserted) throw_invalid("duplicate entity id " + entities_[i].id);
  }
}

const Entity* EntityTable::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entities_[it->second];
}

const Entity& EntityTable::at(const std::string& id) const {
  const Entity* e = find(id);
  if (e == nullptr) throw_invalid("dangling id " + id);
  return *e;
}

MatchLabel label_from_int(long v) {
  if (v == 0) return MatchLabel::kMismatch;
  if (v == 1) return MatchLabel::kMatch;
  throw_invalid("label outside {0,1}: " + std::to_string(v));
}

const char* to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kTrainLabeled: return "train-labeled";
    case SplitKind::kTrainUnlabeled: return "train-unlabeled";
    case SplitKind::kValid: return "valid";
    case SplitKind::kTest: return "test";
  }
  return "?";
}

namespace {

using PairKey = std::pair<std::string, std::string>;

void check_own(const DatasetSplit& split, std::vector<Violation>& out) {
  std::set<PairKey> seen;
  const bool eval = split.kind == SplitKind::kValid || split.kind == SplitKind::kTest;
  for (std::size_t i = 0; i < split.pairs.size(); ++i) {
    const CandidatePair& p = split.pairs[i];
    if (eval && !p.label) {
      out.push_back({Violation::Code::kUnlabeledInEvalSplit, i,
                     std::string("unlabeled in ") + to_string(split.kind)});
    }
    if (split.kind == SplitKind::kTrainUnlabeled && p.label && !p.pseudo) {
      out.push_back({Violation::Code::kLabeledInUnlabeledSplit, i, "labeled in train-unlabeled"});
    }
    if (p.pseudo && !p.label) {
      out.push_back({Violation::Code::kPseudoWithoutLabel, i, "pseudo flag without label"});
    }
    if (!seen.emplace(p.left_id, p.right_id).second) {
      out.push_back({Violation::Code::kDuplicateInSplit, i, "pair repeated within split"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_split(const DatasetSplit& split) {
  std::vector<Violation> out;
  check_own(split, out);
  return out;
}

std::vector<Violation> validate_splits(const std::vector<const DatasetSplit*>& splits) {
  std::vector<Violation> out;
  std::set<PairKey> owner_seen;
  for (const DatasetSplit* split : splits) {
    check_own(*split, out);
    std::set<PairKey> local;
    for (std::size_t i = 0; i < split->pairs.size(); ++i) {
      PairKey key{split->pairs[i].left_id, split->pairs[i].right_id};
      if (!local.insert(key).second) continue;
      if (owner_seen.count(key) != 0) {
        out.push_back({Violation::Code::kPairInTwoSplits, i, "pair in two splits"});
      }
    }
    owner_seen.insert(local.begin(), local.end());
  }
  return out;
}

void SelfTrainConfig::validate() const {
  std::ostringstream bad;
  if (iterations < 1) bad << "iterations must be positive; ";
  if (teacher_epochs < 1) bad << "teacher_epochs must be positive; ";
  if (student_epochs < 1) bad << "student_epochs must be positive; ";
  if (prune_frequency < 1) bad << "prune_frequency must be positive; ";
  if (mc_passes < 1) bad << "mc_passes must be positive; ";
  if (!(u_r >= 0.0 && u_r <= 1.0)) bad << "u_r must lie in [0,1]; ";
  if (!(e_r >= 0.0 && e_r <= 1.0)) bad << "e_r must lie in [0,1]; ";
  if (!bad.str().empty()) throw_invalid("invalid self-training config: " + bad.str());
}

std::pair<std::size_t, std::size_t> split_counts(const SelfTrainState& state) {
  return {state.labeled.size(), state.unlabeled.size()};
}

}  // namespace gemkit
