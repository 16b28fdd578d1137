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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "gemkit/serialize.hpp"
#include "gemkit/vocab.hpp"

namespace gemkit {

namespace detail {
extern const std::string_view kStopwordData;
}  // namespace detail

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> s;
    std::istringstream in{std::string(detail::kStopwordData)};
    for (std::string line; std::getline(in, line);) {
      if (line.empty() || line[0] == '#') continue;
      s.insert(line);
    }
    return s;
  }();
  return words;
}

bool is_stopword(std::string_view token) { return stopwords().count(std::string(token)) != 0; }

CorpusStats CorpusStats::build(std::span<const std::string> documents) {
  CorpusStats stats;
  stats.n_docs_ = documents.size();
  for (const auto& doc : documents) {
    std::unordered_set<std::string> seen;
    for (auto& w : split_words(doc)) {
      if (special_id(w)) continue;
      if (seen.insert(w).second) ++stats.df_[w];
    }
  }
  return stats;
}

std::size_t CorpusStats::df(const std::string& token) const {
  auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

double CorpusStats::idf(const std::string& token) const {
  return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(df(token)))) +
         1.0;
}

std::size_t count_tokens(std::string_view text) { return split_words(text).size(); }

std::string summarize(std::string_view text, const CorpusStats& stats, std::size_t budget) {
  const auto tokens = split_words(text);
  if (tokens.size() <= budget) return std::string(text);

  std::vector<bool> keep(tokens.size(), false);
  std::size_t left = budget;
  for (std::size_t i = 0; i < tokens.size() && left > 0; ++i) {
    if (special_id(tokens[i])) {
      keep[i] = true;
      --left;
    }
  }

  std::unordered_map<std::string, std::size_t> tf;
  for (const auto& t : tokens) ++tf[t];
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!special_id(tokens[i]) && !is_stopword(tokens[i])) candidates.push_back(i);
  }
  std::vector<double> score(tokens.size(), 0.0);
  for (std::size_t i : candidates) {
    score[i] = static_cast<double>(tf[tokens[i]]) * stats.idf(tokens[i]);
  }
  // Higher score first; equal scores keep the earlier position.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  for (std::size_t k = 0; k < candidates.size() && k < left; ++k) keep[candidates[k]] = true;

  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!keep[i]) continue;
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace gemkit
