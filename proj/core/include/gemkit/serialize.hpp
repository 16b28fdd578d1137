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

// Entity and pair serialization with [COL]/[VAL] tags, and TF-IDF
// summarization of over-long entries.

#ifndef GEMKIT_SERIALIZE_HPP_
#define GEMKIT_SERIALIZE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "gemkit/types.hpp"

namespace gemkit {

// Structured: "[COL] a1 [VAL] v1 ... [COL] an [VAL] vn" in source order.
// Semi: nested objects expand recursively in place of the value; lists are
// flattened into one space-joined string. Text: returned unchanged.
std::string serialize_entity(const Entity& e);

// Document frequencies over a corpus of serialized entries.
class CorpusStats {
 public:
  CorpusStats() = default;
  static CorpusStats build(std::span<const std::string> documents);

  std::size_t documents() const { return n_docs_; }
  std::size_t df(const std::string& token) const;
  // ln((1 + N) / (1 + df)) + 1
  double idf(const std::string& token) const;

 private:
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

const std::unordered_set<std::string>& stopwords();
bool is_stopword(std::string_view token);

// Keeps at most `budget` tokens. Text already within budget comes back
// unchanged. Otherwise special markers are kept first, stopwords are dropped,
// and the highest TF-IDF content tokens fill the rest (ties: earlier
// position). Surviving tokens keep their original order.
std::string summarize(std::string_view text, const CorpusStats& stats, std::size_t budget);

std::size_t count_tokens(std::string_view text);

// Frame and template token counts around the two sides.
inline constexpr std::size_t kPairFrameTokens = 3;  // [CLS] [SEP] [SEP]

// Summarizes `side` to `budget` tokens when it is longer.
std::string fit_side(const std::string& side, const CorpusStats& stats, std::size_t budget);

// "[CLS] <left> [SEP] <right> [SEP]". When the result would exceed `budget`
// tokens, each side is summarized to (budget - 3) / 2 tokens.
std::string serialize_pair(const Entity& left, const Entity& right, std::size_t budget,
                           const CorpusStats& stats);

}  // namespace gemkit

#endif  // GEMKIT_SERIALIZE_HPP_
