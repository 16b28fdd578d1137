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

// Loaded data plus everything derived from it (vocabulary, corpus
// statistics, encoded pairs), and the train / self-train drivers built on top.

#ifndef GEMKIT_PIPELINE_HPP_
#define GEMKIT_PIPELINE_HPP_

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gemkit/config.hpp"
#include "gemkit/eval.hpp"
#include "gemkit/ingest.hpp"
#include "gemkit/model.hpp"
#include "gemkit/prompt.hpp"
#include "gemkit/selftrain.hpp"
#include "gemkit/serialize.hpp"
#include "gemkit/trainer.hpp"
#include "gemkit/vocab.hpp"

namespace gemkit {

class Workspace {
 public:
  // Reads tables and splits named by `cfg` and checks split invariants.
  static Workspace load(const RunConfig& cfg);
  static Workspace from_benchmark(const SynthBenchmark& bench, const RunConfig& cfg);

  const RunConfig& config() const { return cfg_; }
  const EntityTable& left() const { return left_; }
  const EntityTable& right() const { return right_; }
  const DatasetSplit& train_labeled() const { return train_labeled_; }
  const DatasetSplit& train_unlabeled() const { return train_unlabeled_; }
  const DatasetSplit& valid() const { return valid_; }
  const DatasetSplit& test() const { return test_; }
  const Vocabulary& vocab() const { return vocab_; }
  const CorpusStats& stats() const { return stats_; }
  const Verbalizer& verbalizer() const { return verb_; }

  ModelConfig model_config() const;

  // Model input for a pair: the templated sequence in prompt mode, the framed
  // pair in baseline mode. Cached.
  const TokenSequence& encode(const CandidatePair& p) const;
  Encoder encoder() const;
  // Requires every pair to be labeled.
  std::vector<Example> examples(const std::vector<CandidatePair>& pairs) const;

  // serialize_pair output, and the templated string (empty in baseline mode).
  std::pair<std::string, std::string> preview(const std::string& left_id,
                                              const std::string& right_id) const;

 private:
  Workspace() = default;
  void prepare();

  RunConfig cfg_;
  EntityTable left_, right_;
  DatasetSplit train_labeled_, train_unlabeled_, valid_, test_;
  Vocabulary vocab_;
  CorpusStats stats_;
  Verbalizer verb_;
  mutable std::unordered_map<std::string, TokenSequence> cache_;
};

struct TrainOutcome {
  TrainResult result;
  Prf test;
};

// Plain supervised training on the labeled split for cfg.train.epochs.
TrainOutcome run_train(const Workspace& ws);

struct SelfTrainOutcome {
  LstResult lst;
  Prf test;          // best student
  Prf teacher_test;  // best teacher of the first iteration
};

SelfTrainOutcome run_selftrain(const Workspace& ws);

Prf evaluate_split(const Workspace& ws, const Model& model, const DatasetSplit& split);

}  // namespace gemkit

#endif  // GEMKIT_PIPELINE_HPP_
