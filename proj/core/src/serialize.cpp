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

#include "gemkit/serialize.hpp"

#include "gemkit/error.hpp"
#include "gemkit/vocab.hpp"

namespace gemkit {

namespace {

void append(std::string& out, std::string_view piece) {
  if (piece.empty()) return;
  if (!out.empty()) out.push_back(' ');
  out += piece;
}

void append_fields(std::string& out, const std::vector<SemiField>& fields);

void append_value(std::string& out, const SemiValue& v) {
  if (const auto* s = std::get_if<std::string>(&v.node)) {
    append(out, *s);
  } else if (const auto* list = std::get_if<SemiValue::List>(&v.node)) {
    for (const auto& item : *list) append_value(out, item);
  } else {
    append_fields(out, std::get<SemiValue::Object>(v.node));
  }
}

void append_fields(std::string& out, const std::vector<SemiField>& fields) {
  for (const auto& f : fields) {
    append(out, "[COL]");
    append(out, f.name);
    append(out, "[VAL]");
    append_value(out, f.value);
  }
}

}  // namespace

std::string serialize_entity(const Entity& e) {
  std::string out;
  if (const auto* attrs = std::get_if<StructuredBody>(&e.body)) {
    for (const auto& a : *attrs) {
      append(out, "[COL]");
      append(out, a.name);
      append(out, "[VAL]");
      append(out, a.value);
    }
  } else if (const auto* fields = std::get_if<SemiBody>(&e.body)) {
    append_fields(out, *fields);
  } else {
    out = std::get<TextBody>(e.body).text;
  }
  return out;
}

std::string fit_side(const std::string& side, const CorpusStats& stats, std::size_t budget) {
  if (count_tokens(side) <= budget) return side;
  return summarize(side, stats, budget);
}

std::string serialize_pair(const Entity& left, const Entity& right, std::size_t budget,
                           const CorpusStats& stats) {
  if (budget < 8) throw_invalid("serialize_pair: budget must be at least 8 tokens");
  std::string l = serialize_entity(left);
  std::string r = serialize_entity(right);
  if (count_tokens(l) + count_tokens(r) + kPairFrameTokens > budget) {
    const std::size_t half = (budget - kPairFrameTokens) / 2;
    l = fit_side(l, stats, half);
    r = fit_side(r, stats, half);
  }
  std::string out = "[CLS]";
  append(out, l);
  append(out, "[SEP]");
  append(out, r);
  append(out, "[SEP]");
  return out;
}

}  // namespace gemkit
