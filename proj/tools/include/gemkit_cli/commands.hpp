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

// Subcommands of the gemkit executable. Each returns the process exit code:
// 0 success, 1 internal error, 2 invalid input.

#ifndef GEMKIT_CLI_COMMANDS_HPP_
#define GEMKIT_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace gemkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;

// Flags shared by every subcommand; set flags override config fields.
struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

// Writes the six benchmark files described by a synthetic spec (JSON) into
// --out. `with_golds` adds train_unlabeled_gold.csv with the hidden labels.
int cmd_gen_synth(const CommonOptions& opts, bool with_golds, std::ostream& out,
                  std::ostream& err);

// Prints serialize_pair output and the templated sequence for one pair.
int cmd_serialize(const CommonOptions& opts, const std::string& left_id,
                  const std::string& right_id, std::ostream& out, std::ostream& err);

// Supervised training on the labeled split only.
int cmd_train(const CommonOptions& opts, std::ostream& out, std::ostream& err);

// Full self-training run; sweep lists in the config expand into sequential
// runs under --out.
int cmd_selftrain(const CommonOptions& opts, std::ostream& out, std::ostream& err);

// P/R/F1 of a checkpoint on the test split; TPR/TNR of a pseudo-label file
// against gold labels when both are given.
int cmd_evaluate(const CommonOptions& opts, const std::filesystem::path& checkpoint,
                 const std::optional<std::filesystem::path>& pseudo,
                 const std::optional<std::filesystem::path>& golds, std::ostream& out,
                 std::ostream& err);

// Parses argv and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gemkit::cli

#endif  // GEMKIT_CLI_COMMANDS_HPP_
