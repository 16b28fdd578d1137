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

// Cloze templates around a serialized pair, label-word verbalizers and the
// mean-of-label-word class scores used for training and prediction.

#ifndef GEMKIT_PROMPT_HPP_
#define GEMKIT_PROMPT_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gemkit/model.hpp"
#include "gemkit/serialize.hpp"
#include "gemkit/types.hpp"
#include "gemkit/vocab.hpp"

namespace gemkit {

// T1: "<left> <right> they are [MASK]"
// T2: "<left> is [MASK] to <right>"
// Continuous kinds swap each template word for a trainable [Pk] token.
enum class TemplateKind { kHardT1, kHardT2, kContinuousT1, kContinuousT2 };

TemplateKind parse_template_kind(std::string_view s);
const char* to_string(TemplateKind kind);

struct PromptTemplate {
  TemplateKind kind = TemplateKind::kContinuousT2;

  bool continuous() const {
    return kind == TemplateKind::kContinuousT1 || kind == TemplateKind::kContinuousT2;
  }
  // Number of template words, which is also the number of [Pk] tokens used by
  // the continuous variant.
  std::size_t n_template_words() const { return 2; }
  std::size_t n_prompt_tokens() const { return continuous() ? n_template_words() : 0; }
  // Template words plus [MASK] plus the [CLS]/[SEP] frame.
  std::size_t overhead() const { return n_template_words() + 3; }

  // Natural-language words the hard variant inserts.
  std::vector<std::string> words() const;
};

// One token of a templated input before id lookup.
struct TemplatePiece {
  std::string text;
  Segment segment;
};

// "[CLS] T(x) [SEP]" as pieces. Each side is summarized to an equal share of
// the budget left after frame and template tokens. Throws Error(kInvalidInput)
// when the result still does not fit.
std::vector<TemplatePiece> template_pieces(const Entity& left, const Entity& right,
                                           const PromptTemplate& t, std::size_t budget,
                                           const CorpusStats& stats);

TokenSequence apply_template(const Entity& left, const Entity& right, const PromptTemplate& t,
                             std::size_t budget, const CorpusStats& stats,
                             const Vocabulary& vocab);

std::string render(const std::vector<TemplatePiece>& pieces);

// Label words per class: index 0 = mismatched, 1 = matched.
class Verbalizer {
 public:
  Verbalizer() = default;
  explicit Verbalizer(std::array<std::vector<std::string>, 2> words);

  static Verbalizer defaults();
  // JSON object {"no": [...], "yes": [...]}.
  static Verbalizer load(const std::filesystem::path& path);
  static Verbalizer from_json_text(std::string_view text);
  std::string to_json_text() const;

  // Resolves word ids; throws when a word is missing from the vocabulary or
  // the classes share a word.
  void resolve(const Vocabulary& vocab);

  const std::array<std::vector<std::string>, 2>& words() const { return words_; }
  const LabelWords& ids() const { return ids_; }
  bool resolved() const { return !ids_.ids[0].empty(); }

 private:
  std::array<std::vector<std::string>, 2> words_;
  LabelWords ids_;
};

// Mean mask probability of each class's label words. No normalization check.
std::array<double, 2> mean_word_scores(std::span<const double> mask_dist, const LabelWords& ids);

// Same, after checking that `mask_dist` sums to 1 within 1e-6 and covers every
// label word.
std::array<double, 2> class_score(std::span<const double> mask_dist, const Verbalizer& verb);

struct Prediction {
  MatchLabel label = MatchLabel::kMismatch;
  std::array<double, 2> probs{0.5, 0.5};
};

// Argmax with ties to class 0; probabilities are the scores over their sum.
Prediction decide(const std::array<double, 2>& scores);

// Scores a templated sequence. In classifier mode the verbalizer is unused.
Prediction predict(const TokenSequence& seq, const Model& model, HeadMode head,
                   const Verbalizer& verb, ForwardMode mode = ForwardMode::deterministic());

}  // namespace gemkit

#endif  // GEMKIT_PROMPT_HPP_
