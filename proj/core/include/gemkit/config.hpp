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

// Experiment configuration: one JSON file whose relative paths resolve
// against the file's own directory.

#ifndef GEMKIT_CONFIG_HPP_
#define GEMKIT_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gemkit/ingest.hpp"
#include "gemkit/prompt.hpp"
#include "gemkit/selftrain.hpp"
#include "gemkit/trainer.hpp"
#include "gemkit/types.hpp"

namespace gemkit {

enum class RunMode { kPrompt, kFinetuneBaseline };

RunMode parse_run_mode(std::string_view s);
const char* to_string(RunMode m);

struct SplitPaths {
  std::filesystem::path train_labeled;
  std::filesystem::path train_unlabeled;
  std::filesystem::path valid;
  std::filesystem::path test;
};

struct RunConfig {
  TableDescriptor left;
  TableDescriptor right;
  SplitPaths splits;
  PromptTemplate prompt;
  std::optional<std::filesystem::path> verbalizer;  // default label words when absent
  RunMode mode = RunMode::kPrompt;
  std::size_t max_len = 512;
  TrainSpec train;
  SelfTrainConfig selftrain;
  SelectionStrategy selection = SelectionStrategy::kUncertainty;
  std::size_t dim = 64;
  std::size_t ffn_dim = 256;
  double align_temperature = 2.0;
  std::uint64_t seed = 42;
  std::filesystem::path out = "run";

  // Parses a JSON object. Relative paths resolve against `base_dir`. Unknown
  // keys are rejected.
  static RunConfig from_json_text(std::string_view text, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
  // Absolute paths; loads back to an equal configuration.
  std::string to_json_text() const;

  // Pushes `seed` into the training and self-training sections.
  void set_seed(std::uint64_t s);
  void validate() const;
  // Throws Error(kInvalidInput) naming the first missing input file.
  void check_paths() const;

  HeadMode head() const {
    return mode == RunMode::kPrompt ? HeadMode::kPrompt : HeadMode::kClassifier;
  }
};

// A configuration for the files written by write_benchmark.
RunConfig config_for_benchmark(const BenchmarkFiles& files, const SynthSpec& spec);

// Expands list-valued sweep fields ("template", "selftrain.u_r",
// "selftrain.e_r") into one configuration per combination, in row-major
// order. Each expanded run writes under <out>/<label>. Returns (label, JSON)
// pairs; a configuration without lists yields itself with an empty label.
std::vector<std::pair<std::string, std::string>> expand_grid(std::string_view text);

SynthSpec synth_spec_from_json_text(std::string_view text);
std::string synth_spec_to_json_text(const SynthSpec& spec);

}  // namespace gemkit

#endif  // GEMKIT_CONFIG_HPP_
