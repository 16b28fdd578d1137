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

// Teacher/student self-training: MC-Dropout pseudo-label selection, MC-EL2N
// pruning of the labeled set, and the confidence-based selection baseline.

#ifndef GEMKIT_SELFTRAIN_HPP_
#define GEMKIT_SELFTRAIN_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gemkit/model.hpp"
#include "gemkit/trainer.hpp"
#include "gemkit/types.hpp"

namespace gemkit {

// floor(n * ratio), guarded against products like 0.29 * 100 landing just
// under an integer.
std::size_t top_count(std::size_t n, double ratio);

// Population standard deviation. Identical values give exactly 0.
double population_std(std::span<const double> xs);

// Mean L2 distance between each pass's class distribution and one-hot(label).
double el2n_from_passes(std::span<const std::array<double, 2>> passes, MatchLabel label);

// The floor(N * ratio) indices with the smallest / largest key, ties by
// ascending index. Returned in ascending index order.
std::vector<std::size_t> select_smallest(std::span<const double> keys, double ratio);
std::vector<std::size_t> select_largest(std::span<const double> keys, double ratio);

// Class distribution of a sequence under a forward mode. Usually a model;
// any function of (sequence, mode) will do.
struct Scorer {
  std::function<std::array<double, 2>(const TokenSequence&, ForwardMode)> fn;

  static Scorer of(const Model& model, HeadMode head, const LabelWords& words) {
    return Scorer{[&model, head, &words](const TokenSequence& seq, ForwardMode mode) {
      return class_distribution(seq, model, head, words, mode);
    }};
  }

  std::array<double, 2> operator()(const TokenSequence& seq, ForwardMode mode) const {
    return fn(seq, mode);
  }
};

// Std of the positive-class probability over `n` dropout passes seeded from
// `seed`. n = 1 gives 0. `log`, when set, receives each pass's probability.
double mc_uncertainty(const Scorer& s, const TokenSequence& seq, int n, std::uint64_t seed,
                      std::vector<double>* log = nullptr);

// Mean over `n` dropout passes of ||p - onehot(label)||_2. Throws
// Error(kInvalidInput) when the label is absent.
double mc_el2n(const Scorer& s, const TokenSequence& seq, std::optional<MatchLabel> label, int n,
               std::uint64_t seed, std::vector<std::array<double, 2>>* log = nullptr);

using Encoder = std::function<const TokenSequence&(const CandidatePair&)>;

struct Selection {
  std::vector<std::size_t> indices;  // into the unlabeled list, ascending
  std::vector<CandidatePair> pairs;  // pseudo-labeled copies
  std::vector<double> keys;          // uncertainty or confidence per unlabeled pair
};

// The floor(N_U * u_r) least uncertain unlabeled pairs, labeled with the
// teacher's deterministic prediction.
Selection pseudo_select_uncertainty(const Scorer& teacher, std::span<const CandidatePair> unlabeled,
                                    const Encoder& encode, double u_r, int n, std::uint64_t seed);

// The floor(N_U * ratio) pairs with the highest deterministic max-class
// probability.
Selection pseudo_select_confidence(const Scorer& teacher, std::span<const CandidatePair> unlabeled,
                                   const Encoder& encode, double ratio);

struct PruneResult {
  std::vector<CandidatePair> kept;
  std::vector<CandidatePair> pruned;
  std::vector<std::size_t> pruned_indices;  // ascending
};

// Removes the floor(N_L * e_r) lowest-scoring pairs.
PruneResult prune(std::span<const CandidatePair> labeled, double e_r, std::span<const double> scores);

enum class SelectionStrategy { kUncertainty, kConfidence };

SelectionStrategy parse_selection_strategy(const std::string& s);
const char* to_string(SelectionStrategy s);

struct LstOptions {
  SelfTrainConfig config;
  SelectionStrategy selection = SelectionStrategy::kUncertainty;
  TrainSpec train;
  ModelConfig model;
  HeadMode head = HeadMode::kPrompt;
  LabelWords words;
  // Called with the pools and the record after every log line.
  std::function<void(const SelfTrainState&, const std::string&)> observer;
};

struct LstResult {
  Model best;  // best student on validation F1
  int best_iteration = 0;
  int best_epoch = 0;
  double best_valid_f1 = 0.0;
  Model first_teacher;  // best teacher of iteration 1
  SelfTrainState state;
  std::vector<Selection> selections;  // per iteration
  std::vector<std::string> log;       // JSON lines
  std::size_t teacher_steps = 0;
  std::size_t student_steps = 0;
};

// Runs `config.iterations` rounds. Pairs move between the pools of `state`;
// only the labeled and unlabeled training pools and the validation examples
// are ever seen.
LstResult run_lst(SelfTrainState state, std::span<const Example> valid, const Encoder& encode,
                  const LstOptions& opts);

}  // namespace gemkit

#endif  // GEMKIT_SELFTRAIN_HPP_
