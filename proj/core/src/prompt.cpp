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

#include "gemkit/prompt.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gemkit/error.hpp"

namespace gemkit {

namespace {

constexpr double kSumTolerance = 1e-6;

void push_side(std::vector<TemplatePiece>& out, const std::string& text, Segment seg) {
  for (auto& w : split_words(text)) out.push_back({std::move(w), seg});
}

}  // namespace

TemplateKind parse_template_kind(std::string_view s) {
  if (s == "hard-T1") return TemplateKind::kHardT1;
  if (s == "hard-T2") return TemplateKind::kHardT2;
  if (s == "continuous-T1") return TemplateKind::kContinuousT1;
  if (s == "continuous-T2") return TemplateKind::kContinuousT2;
  throw_invalid("unknown template kind '" + std::string(s) + "'");
}

const char* to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kHardT1: return "hard-T1";
    case TemplateKind::kHardT2: return "hard-T2";
    case TemplateKind::kContinuousT1: return "continuous-T1";
    case TemplateKind::kContinuousT2: return "continuous-T2";
  }
  return "?";
}

std::vector<std::string> PromptTemplate::words() const {
  if (kind == TemplateKind::kHardT1 || kind == TemplateKind::kContinuousT1) {
    return {"they", "are"};
  }
  return {"is", "to"};
}

std::vector<TemplatePiece> template_pieces(const Entity& left, const Entity& right,
                                           const PromptTemplate& t, std::size_t budget,
                                           const CorpusStats& stats) {
  if (budget < t.overhead() + 2) {
    throw_invalid("apply_template: budget " + std::to_string(budget) +
                  " leaves no room for the template");
  }
  std::string l = serialize_entity(left);
  std::string r = serialize_entity(right);
  if (count_tokens(l) + count_tokens(r) + t.overhead() > budget) {
    const std::size_t half = (budget - t.overhead()) / 2;
    l = fit_side(l, stats, half);
    r = fit_side(r, stats, half);
  }

  const auto words = t.words();
  auto word = [&](std::size_t k) {
    return TemplatePiece{t.continuous() ? prompt_marker(static_cast<int>(k)) : words[k],
                         Segment::kTemplate};
  };
  const TemplatePiece mask{"[MASK]", Segment::kFrame};

  std::vector<TemplatePiece> out;
  out.push_back({"[CLS]", Segment::kFrame});
  push_side(out, l, Segment::kLeft);
  if (t.kind == TemplateKind::kHardT1 || t.kind == TemplateKind::kContinuousT1) {
    push_side(out, r, Segment::kRight);
    out.push_back(word(0));
    out.push_back(word(1));
    out.push_back(mask);
  } else {
    out.push_back(word(0));
    out.push_back(mask);
    out.push_back(word(1));
    push_side(out, r, Segment::kRight);
  }
  out.push_back({"[SEP]", Segment::kFrame});

  if (out.size() > budget) {
    throw_invalid("apply_template: " + std::to_string(out.size()) +
                  " tokens after summarization exceed budget " + std::to_string(budget));
  }
  return out;
}

TokenSequence apply_template(const Entity& left, const Entity& right, const PromptTemplate& t,
                             std::size_t budget, const CorpusStats& stats,
                             const Vocabulary& vocab) {
  TokenSequence seq;
  for (const auto& p : template_pieces(left, right, t, budget, stats)) {
    if (p.text == "[MASK]") seq.mask_position = seq.tokens.size();
    seq.tokens.push_back(vocab.id(p.text));
    seq.segments.push_back(p.segment);
  }
  return seq;
}

std::string render(const std::vector<TemplatePiece>& pieces) {
  std::string out;
  for (const auto& p : pieces) {
    if (!out.empty()) out.push_back(' ');
    out += p.text;
  }
  return out;
}

Verbalizer::Verbalizer(std::array<std::vector<std::string>, 2> words) : words_(std::move(words)) {
  for (int c = 0; c < 2; ++c) {
    if (words_[c].empty()) throw_invalid("verbalizer: class " + std::to_string(c) + " has no words");
    for (const auto& w : words_[c]) {
      if (w.empty()) throw_invalid("verbalizer: empty label word");
    }
  }
  std::set<std::string> no(words_[0].begin(), words_[0].end());
  for (const auto& w : words_[1]) {
    if (no.contains(w)) throw_invalid("verbalizer: '" + w + "' is a label word of both classes");
  }
}

Verbalizer Verbalizer::defaults() {
  return Verbalizer({{{"mismatched", "different", "irrelevant"}, {"matched", "similar", "relevant"}}});
}

Verbalizer Verbalizer::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_invalid(std::string("verbalizer: ") + e.what());
  }
  if (!j.is_object() || !j.contains("no") || !j.contains("yes")) {
    throw_invalid("verbalizer: expected an object with \"no\" and \"yes\" word lists");
  }
  std::array<std::vector<std::string>, 2> words;
  const char* keys[2] = {"no", "yes"};
  for (int c = 0; c < 2; ++c) {
    const auto& list = j.at(keys[c]);
    if (!list.is_array()) throw_invalid(std::string("verbalizer: \"") + keys[c] + "\" is not a list");
    for (const auto& w : list) {
      if (!w.is_string()) throw_invalid("verbalizer: label words must be strings");
      words[c].push_back(w.get<std::string>());
    }
  }
  return Verbalizer(std::move(words));
}

Verbalizer Verbalizer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open verbalizer file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string Verbalizer::to_json_text() const {
  nlohmann::json j;
  j["no"] = words_[0];
  j["yes"] = words_[1];
  return j.dump();
}

void Verbalizer::resolve(const Vocabulary& vocab) {
  LabelWords ids;
  for (int c = 0; c < 2; ++c) {
    for (const auto& w : words_[c]) {
      const auto id = vocab.find(w);
      if (!id || Vocabulary::is_special(*id)) {
        throw_invalid("verbalizer: label word '" + w + "' is not in the vocabulary");
      }
      ids.ids[c].push_back(*id);
    }
  }
  ids_ = std::move(ids);
}

std::array<double, 2> mean_word_scores(std::span<const double> mask_dist, const LabelWords& ids) {
  std::array<double, 2> s{0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    for (int id : ids.ids[c]) s[c] += mask_dist[static_cast<std::size_t>(id)];
    s[c] /= static_cast<double>(ids.ids[c].size());
  }
  return s;
}

std::array<double, 2> class_score(std::span<const double> mask_dist, const Verbalizer& verb) {
  if (!verb.resolved()) throw_invalid("class_score: verbalizer not resolved against a vocabulary");
  const double sum = std::accumulate(mask_dist.begin(), mask_dist.end(), 0.0);
  if (!(std::abs(sum - 1.0) <= kSumTolerance)) {
    throw_invalid("class_score: mask distribution sums to " + std::to_string(sum));
  }
  for (const auto& ids : verb.ids().ids) {
    for (int id : ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= mask_dist.size()) {
        throw_invalid("class_score: label word id " + std::to_string(id) +
                      " outside the distribution support");
      }
    }
  }
  return mean_word_scores(mask_dist, verb.ids());
}

Prediction decide(const std::array<double, 2>& scores) {
  const double total = scores[0] + scores[1];
  if (!(total > 0.0)) throw_invalid("degenerate verbalizer mass");
  Prediction p;
  p.probs = {scores[0] / total, scores[1] / total};
  p.label = scores[1] > scores[0] ? MatchLabel::kMatch : MatchLabel::kMismatch;
  return p;
}

Prediction predict(const TokenSequence& seq, const Model& model, HeadMode head,
                   const Verbalizer& verb, ForwardMode mode) {
  if (head == HeadMode::kClassifier) return decide(forward_cls(seq, model, mode));
  const Vec dist = forward_mask(seq, model, mode);
  return decide(class_score(std::span<const double>(dist.data(), dist.size()), verb));
}

}  // namespace gemkit
