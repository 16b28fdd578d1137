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

// Mini-batch training with seeded shuffling and dropout, and best-on-validation
// model selection.

#ifndef GEMKIT_TRAINER_HPP_
#define GEMKIT_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gemkit/eval.hpp"
#include "gemkit/model.hpp"
#include "gemkit/optim.hpp"

namespace gemkit {

struct TrainSpec {
  double learning_rate = 2e-3;
  std::size_t batch_size = 32;
  int epochs = 20;
  double dropout_rate = 0.1;
  double weight_decay = 0.01;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Example {
  TokenSequence seq;
  MatchLabel label = MatchLabel::kMismatch;
};

// Owns a model and its optimizer state across epochs, so callers can change
// the training set between epochs.
class Trainer {
 public:
  Trainer(Model model, HeadMode head, LabelWords words, const TrainSpec& spec);

  // One shuffled pass over `data`. Returns the mean example loss. Throws
  // Error(kInternal) naming the batch when a loss is not finite.
  double run_epoch(std::span<const Example> data);

  const Model& model() const { return model_; }
  HeadMode head() const { return head_; }
  const LabelWords& words() const { return words_; }
  int epochs_done() const { return epoch_; }
  std::size_t steps() const { return steps_; }

 private:
  Model model_;
  HeadMode head_;
  LabelWords words_;
  TrainSpec spec_;
  AdamW opt_;
  Parameters grad_;
  int epoch_ = 0;
  std::size_t steps_ = 0;
  std::uint64_t passes_ = 0;
};

// Deterministic predictions for every example.
std::vector<MatchLabel> predict_labels(const Model& model, HeadMode head, const LabelWords& words,
                                       std::span<const Example> data);
Prf evaluate(const Model& model, HeadMode head, const LabelWords& words,
             std::span<const Example> data);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  std::size_t train_size = 0;
  std::optional<Prf> valid;
};

struct TrainResult {
  Model best;
  int best_epoch = 0;  // 1-based; the last epoch when there is no validation set
  std::vector<EpochRecord> history;
  std::size_t steps = 0;
};

// Trains a fresh copy of `init` for spec.epochs and keeps the epoch with the
// highest validation F1 (earliest on ties).
TrainResult train(const Model& init, HeadMode head, const LabelWords& words,
                  std::span<const Example> data, std::span<const Example> valid,
                  const TrainSpec& spec);

}  // namespace gemkit

#endif  // GEMKIT_TRAINER_HPP_
