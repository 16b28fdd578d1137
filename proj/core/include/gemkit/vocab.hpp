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

// Word-level vocabulary and tokenizer. Text is lowercased and split into
// alphanumeric runs and single punctuation characters; bracketed special
// markers such as [CLS] or [MASK] pass through as single tokens.

#ifndef GEMKIT_VOCAB_HPP_
#define GEMKIT_VOCAB_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gemkit {

enum class SpecialToken : int {
  kPad = 0,
  kUnk = 1,
  kCls = 2,
  kSep = 3,
  kMask = 4,
  kCol = 5,
  kVal = 6,
  kPrompt0 = 7,  // [P0] .. [P7] follow contiguously
};

inline constexpr int kMaxPromptTokens = 8;
inline constexpr int kNumSpecials = static_cast<int>(SpecialToken::kPrompt0) + kMaxPromptTokens;

inline constexpr int id_of(SpecialToken t) { return static_cast<int>(t); }

std::string special_text(int id);
std::string prompt_marker(int slot);
// Special id for an exact marker string such as "[SEP]".
std::optional<int> special_id(std::string_view marker);

// Splits into lowercased tokens, keeping special markers verbatim.
std::vector<std::string> split_words(std::string_view text);

class Vocabulary {
 public:
  // Specials only.
  Vocabulary();

  // Words with frequency >= min_freq, ordered by frequency descending then
  // lexicographically, after the fixed specials.
  static Vocabulary build(std::span<const std::string> corpus, std::size_t min_freq);

  // One token per line; the first line is id 0.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return words_.size(); }
  std::optional<int> find(std::string_view word) const;
  int id(std::string_view word) const;  // UNK when absent
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& words() const { return words_; }

  static bool is_special(int id) { return id >= 0 && id < kNumSpecials; }
  // Slot k for [Pk], otherwise -1.
  static int prompt_slot(int id) {
    const int base = id_of(SpecialToken::kPrompt0);
    return (id >= base && id < base + kMaxPromptTokens) ? id - base : -1;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  void add(std::string word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

// Role of each position, used by the encoder to tell the two entity
// serializations apart from frame and template tokens.
enum class Segment : std::uint8_t { kFrame, kLeft, kRight, kTemplate };

struct TokenSequence {
  std::vector<int> tokens;
  std::vector<Segment> segments;
  std::optional<std::size_t> mask_position;

  std::size_t size() const { return tokens.size(); }
};

// Tokenizes a framed string. Content before the first [SEP] is the left
// segment, content after it the right segment. Longer input is truncated to
// max_len. Throws on more than one [MASK].
TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_len);

std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab);

}  // namespace gemkit

#endif  // GEMKIT_VOCAB_HPP_
