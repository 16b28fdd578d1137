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

// Loading and writing entity tables and pair splits, plus a seeded generator
// of synthetic benchmarks with planted matches.

#ifndef GEMKIT_INGEST_HPP_
#define GEMKIT_INGEST_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gemkit/types.hpp"

namespace gemkit {

enum class TableFormat { kRelationalCsv, kSemiJsonl, kTextLines };

TableFormat parse_table_format(std::string_view name);
std::string_view to_string(TableFormat format);

struct TableDescriptor {
  std::filesystem::path path;
  TableFormat format = TableFormat::kRelationalCsv;
  std::string id_field = "id";
};

std::vector<Entity> load_table(const TableDescriptor& desc);

// Inverse of load_table. Relational tables take their header from the first
// entity; every entity must be of the kind matching `format`.
void write_table(const TableDescriptor& desc, const std::vector<Entity>& entities);

// Pairs CSV: ltable_id,rtable_id[,label]. Without a label column the pairs
// come back unlabeled.
DatasetSplit load_pairs(const std::filesystem::path& path, const EntityTable& left,
                        const EntityTable& right, SplitKind kind);

void write_pairs(const std::filesystem::path& path, const std::vector<CandidatePair>& pairs,
                 bool with_labels);

struct SynthSpec {
  std::size_t n_left = 500;
  std::size_t n_right = 500;
  std::size_t n_pairs = 1000;
  double match_rate = 0.3;
  TableFormat left_format = TableFormat::kRelationalCsv;
  TableFormat right_format = TableFormat::kSemiJsonl;
  double noise = 0.2;
  // Fraction of the training pool that keeps its labels.
  double labeled_rate = 0.1;
  std::uint64_t seed = 1;

  std::size_t planted_positives() const;
  void validate() const;
};

struct SynthBenchmark {
  std::vector<Entity> left;
  std::vector<Entity> right;
  DatasetSplit train_labeled;
  DatasetSplit train_unlabeled;
  DatasetSplit valid;
  DatasetSplit test;
  // Gold labels of train_unlabeled, index-aligned. Evaluation harness only.
  std::vector<MatchLabel> unlabeled_gold;
};

SynthBenchmark gen_synthetic(const SynthSpec& spec);

struct BenchmarkFiles {
  std::filesystem::path left;
  std::filesystem::path right;
  std::filesystem::path train_labeled;
  std::filesystem::path train_unlabeled;
  std::filesystem::path valid;
  std::filesystem::path test;
};

BenchmarkFiles benchmark_file_names(const SynthSpec& spec);

// Writes the six benchmark files into `dir` and returns their paths.
BenchmarkFiles write_benchmark(const SynthBenchmark& bench, const SynthSpec& spec,
                               const std::filesystem::path& dir);

}  // namespace gemkit

#endif  // GEMKIT_INGEST_HPP_
