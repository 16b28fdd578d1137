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

#include "gemkit/trainer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gemkit/error.hpp"
#include "gemkit/rng.hpp"

namespace gemkit {

namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;

}  // namespace

void TrainSpec::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw_invalid("train: learning_rate must be a non-negative number");
  }
  if (batch_size == 0) throw_invalid("train: batch_size must be positive");
  if (epochs <= 0) throw_invalid("train: epochs must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw_invalid("train: dropout_rate must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw_invalid("train: weight_decay must be non-negative");
}

Trainer::Trainer(Model model, HeadMode head, LabelWords words, const TrainSpec& spec)
    : model_(std::move(model)),
      head_(head),
      words_(std::move(words)),
      spec_(spec),
      opt_(model_.params, AdamWConfig{.learning_rate = spec.learning_rate,
                                      .weight_decay = spec.weight_decay}),
      grad_(Parameters::zeros_like(model_.params)) {
  spec_.validate();
}

double Trainer::run_epoch(std::span<const Example> data) {
  ++epoch_;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle(Rng::derive(Rng::derive(spec_.seed, kShuffleStream), static_cast<std::uint64_t>(epoch_)));
  shuffle.shuffle(std::span<std::size_t>(order));

  const std::uint64_t dropout_seed = Rng::derive(spec_.seed, kDropoutStream);
  double total = 0.0;
  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < order.size(); start += spec_.batch_size, ++batch_index) {
    const std::size_t end = std::min(order.size(), start + spec_.batch_size);
    const double weight = 1.0 / static_cast<double>(end - start);
    grad_.set_zero();
    double batch_loss = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      const Example& ex = data[order[k]];
      const auto mode = ForwardMode::sampled(Rng::derive(dropout_seed, passes_++));
      batch_loss += loss_and_grad(ex.seq, model_, head_, words_, Target::hard(to_int(ex.label)),
                                  mode, &grad_, weight);
    }
    if (!std::isfinite(batch_loss)) {
      throw Error(ErrorKind::kInternal, "non-finite loss in epoch " + std::to_string(epoch_) +
                                            " batch " + std::to_string(batch_index));
    }
    opt_.step(model_.params, grad_);
    ++steps_;
    total += batch_loss;
  }
  return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

std::vector<MatchLabel> predict_labels(const Model& model, HeadMode head, const LabelWords& words,
                                       std::span<const Example> data) {
  std::vector<MatchLabel> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    const auto q = class_distribution(ex.seq, model, head, words, ForwardMode::deterministic());
    out.push_back(q[1] > q[0] ? MatchLabel::kMatch : MatchLabel::kMismatch);
  }
  return out;
}

Prf evaluate(const Model& model, HeadMode head, const LabelWords& words,
             std::span<const Example> data) {
  std::vector<MatchLabel> golds;
  golds.reserve(data.size());
  for (const auto& ex : data) golds.push_back(ex.label);
  return prf(predict_labels(model, head, words, data), golds);
}

TrainResult train(const Model& init, HeadMode head, const LabelWords& words,
                  std::span<const Example> data, std::span<const Example> valid,
                  const TrainSpec& spec) {
  if (data.empty()) throw_invalid("train: no training examples");
  Trainer trainer(init, head, words, spec);
  TrainResult result;
  double best_f1 = -1.0;
  for (int e = 0; e < spec.epochs; ++e) {
    EpochRecord rec;
    rec.loss = trainer.run_epoch(data);
    rec.epoch = trainer.epochs_done();
    rec.train_size = data.size();
    if (!valid.empty()) {
      rec.valid = evaluate(trainer.model(), head, words, valid);
      if (rec.valid->f1 > best_f1) {
        best_f1 = rec.valid->f1;
        result.best = trainer.model();
        result.best_epoch = rec.epoch;
      }
    }
    result.history.push_back(rec);
  }
  if (valid.empty()) {
    result.best = trainer.model();
    result.best_epoch = trainer.epochs_done();
  }
  result.steps = trainer.steps();
  return result;
}

}  // namespace gemkit
