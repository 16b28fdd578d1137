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

#include "gemkit/vocab.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>

#include "gemkit/error.hpp"

namespace gemkit {

namespace {

constexpr std::array<std::string_view, 7> kFixedSpecials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]",
                                                            "[MASK]", "[COL]", "[VAL]"};

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::string prompt_marker(int slot) { return "[P" + std::to_string(slot) + "]"; }

std::string special_text(int id) {
  if (id >= 0 && id < static_cast<int>(kFixedSpecials.size())) {
    return std::string(kFixedSpecials[static_cast<std::size_t>(id)]);
  }
  const int slot = Vocabulary::prompt_slot(id);
  if (slot >= 0) return prompt_marker(slot);
  throw_internal("not a special id: " + std::to_string(id));
}

std::optional<int> special_id(std::string_view marker) {
  for (std::size_t i = 0; i < kFixedSpecials.size(); ++i) {
    if (marker == kFixedSpecials[i]) return static_cast<int>(i);
  }
  if (marker.size() == 4 && marker[0] == '[' && marker[1] == 'P' && marker[3] == ']' &&
      marker[2] >= '0' && marker[2] < '0' + kMaxPromptTokens) {
    return id_of(SpecialToken::kPrompt0) + (marker[2] - '0');
  }
  return std::nullopt;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c) != 0) {
      ++i;
      continue;
    }
    if (c == '[') {
      const auto close = text.find(']', i);
      if (close != std::string_view::npos && close - i <= 7) {
        const auto marker = text.substr(i, close - i + 1);
        if (special_id(marker)) {
          out.emplace_back(marker);
          i = close + 1;
          continue;
        }
      }
    }
    if (is_word_byte(c)) {
      std::string w;
      while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) {
        w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
        ++i;
      }
      out.push_back(std::move(w));
      continue;
    }
    out.emplace_back(1, static_cast<char>(c));
    ++i;
  }
  return out;
}

Vocabulary::Vocabulary() {
  for (int id = 0; id < kNumSpecials; ++id) add(special_text(id));
}

void Vocabulary::add(std::string word) {
  const int id = static_cast<int>(words_.size());
  if (!ids_.emplace(word, id).second) throw_invalid("vocabulary: duplicate token '" + word + "'");
  words_.push_back(std::move(word));
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus, std::size_t min_freq) {
  if (corpus.empty()) throw_invalid("build_vocab: empty corpus");
  std::map<std::string, std::size_t> freq;
  for (const auto& doc : corpus) {
    for (auto& w : split_words(doc)) {
      if (special_id(w)) continue;
      ++freq[w];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, n] : freq) {
    if (n >= min_freq) kept.emplace_back(w, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (auto& [w, n] : kept) v.add(w);
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open " + path.string());
  Vocabulary v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no < static_cast<std::size_t>(kNumSpecials)) {
      if (line != v.words_[line_no]) {
        throw_invalid(path.string() + ": line " + std::to_string(line_no + 1) + " should be " +
                      v.words_[line_no]);
      }
    } else {
      v.add(line);
    }
    ++line_no;
  }
  if (line_no < static_cast<std::size_t>(kNumSpecials)) {
    throw_invalid(path.string() + ": truncated vocabulary");
  }
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_invalid("cannot write " + path.string());
  for (const auto& w : words_) out << w << '\n';
}

std::optional<int> Vocabulary::find(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::id(std::string_view word) const {
  return find(word).value_or(id_of(SpecialToken::kUnk));
}

TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_len) {
  TokenSequence seq;
  int seps = 0;
  for (const auto& w : split_words(text)) {
    if (seq.tokens.size() >= max_len) break;
    const auto special = special_id(w);
    const int id = special ? *special : vocab.id(w);
    Segment seg = Segment::kFrame;
    if (special) {
      if (*special == id_of(SpecialToken::kMask)) {
        if (seq.mask_position) throw_invalid("tokenize: more than one [MASK]");
        seq.mask_position = seq.tokens.size();
      }
      if (*special == id_of(SpecialToken::kCol) || *special == id_of(SpecialToken::kVal)) {
        seg = seps == 0 ? Segment::kLeft : Segment::kRight;
      } else if (Vocabulary::prompt_slot(*special) >= 0) {
        seg = Segment::kTemplate;
      }
      if (*special == id_of(SpecialToken::kSep)) ++seps;
    } else {
      seg = seps == 0 ? Segment::kLeft : Segment::kRight;
    }
    seq.tokens.push_back(id);
    seq.segments.push_back(seg);
  }
  return seq;
}

std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab) {
  std::string out;
  for (int id : seq.tokens) {
    if (!out.empty()) out.push_back(' ');
    out += vocab.word(id);
  }
  return out;
}

}  // namespace gemkit
