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

#include <gtest/gtest.h>

#include "gemkit/error.hpp"
#include "gemkit/vocab.hpp"
#include "test_util.hpp"

namespace gemkit {
namespace {

using Words = std::vector<std::string>;

TEST(SplitWords, LowercasesAndSplitsPunctuation) {
  EXPECT_EQ(split_words("Hello, World!"), (Words{"hello", ",", "world", "!"}));
  EXPECT_EQ(split_words("d.sivakumar 612-343"), (Words{"d", ".", "sivakumar", "612", "-", "343"}));
  EXPECT_EQ(split_words("  "), Words{});
}

TEST(SplitWords, KeepsSpecialMarkers) {
  EXPECT_EQ(split_words("[COL] Name [VAL] x[SEP]y [P1] [MASK]"),
            (Words{"[COL]", "name", "[VAL]", "x", "[SEP]", "y", "[P1]", "[MASK]"}));
  EXPECT_EQ(split_words("[note]"), (Words{"[", "note", "]"}));
  EXPECT_EQ(split_words("[P9]"), (Words{"[", "p9", "]"}));
}

TEST(Specials, FixedIds) {
  EXPECT_EQ(special_id("[CLS]"), id_of(SpecialToken::kCls));
  EXPECT_EQ(special_id("[P3]"), id_of(SpecialToken::kPrompt0) + 3);
  EXPECT_FALSE(special_id("[cls]").has_value());
  EXPECT_EQ(special_text(id_of(SpecialToken::kMask)), "[MASK]");
  EXPECT_EQ(prompt_marker(2), "[P2]");
  EXPECT_EQ(Vocabulary::prompt_slot(id_of(SpecialToken::kPrompt0) + 1), 1);
  EXPECT_EQ(Vocabulary::prompt_slot(id_of(SpecialToken::kMask)), -1);
}

TEST(Vocabulary, BuildOrdersByFrequencyThenLexicographic) {
  const std::vector<std::string> corpus{"b a c", "a b [COL] d", "a"};
  const auto v = Vocabulary::build(corpus, 1);
  ASSERT_EQ(v.size(), static_cast<std::size_t>(kNumSpecials) + 4);
  EXPECT_EQ(v.word(kNumSpecials), "a");
  EXPECT_EQ(v.word(kNumSpecials + 1), "b");
  EXPECT_EQ(v.word(kNumSpecials + 2), "c");
  EXPECT_EQ(v.word(kNumSpecials + 3), "d");
  const auto v2 = Vocabulary::build(corpus, 2);
  EXPECT_EQ(v2.size(), static_cast<std::size_t>(kNumSpecials) + 2);
  EXPECT_EQ(v2.id("c"), id_of(SpecialToken::kUnk));
  EXPECT_THROW(Vocabulary::build(std::vector<std::string>{}, 1), Error);
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  testing::TempDir dir;
  const std::vector<std::string> corpus{"alpha beta", "beta gamma"};
  const auto v = Vocabulary::build(corpus, 1);
  v.save(dir / "v.txt");
  EXPECT_EQ(Vocabulary::load(dir / "v.txt"), v);
  testing::write_file(dir / "bad.txt", "[PAD]\n[CLS]\n");
  EXPECT_THROW(Vocabulary::load(dir / "bad.txt"), Error);
  testing::write_file(dir / "dup.txt", testing::read_file(dir / "v.txt") + "beta\n");
  EXPECT_THROW(Vocabulary::load(dir / "dup.txt"), Error);
}

TEST(Tokenize, SegmentsAndMask) {
  const std::vector<std::string> corpus{"x y z"};
  const auto v = Vocabulary::build(corpus, 1);
  const auto s = tokenize("[CLS] [COL] x [VAL] y [P0] [MASK] [P1] z [SEP]", v, 64);
  ASSERT_EQ(s.size(), 10u);
  EXPECT_EQ(s.mask_position, 6u);
  EXPECT_EQ(s.segments[0], Segment::kFrame);
  EXPECT_EQ(s.segments[1], Segment::kLeft);
  EXPECT_EQ(s.segments[2], Segment::kLeft);
  EXPECT_EQ(s.segments[5], Segment::kTemplate);
  EXPECT_EQ(s.segments[6], Segment::kFrame);
  EXPECT_EQ(s.segments[9], Segment::kFrame);

  const auto p = tokenize("[CLS] x [SEP] [COL] y [SEP]", v, 64);
  EXPECT_EQ(p.segments[1], Segment::kLeft);
  EXPECT_EQ(p.segments[2], Segment::kFrame);
  EXPECT_EQ(p.segments[3], Segment::kRight);
  EXPECT_EQ(p.segments[4], Segment::kRight);
  EXPECT_FALSE(p.mask_position.has_value());
  EXPECT_EQ(detokenize(p, v), "[CLS] x [SEP] [COL] y [SEP]");
}

TEST(Tokenize, UnknownWordsAndTruncation) {
  const std::vector<std::string> corpus{"x"};
  const auto v = Vocabulary::build(corpus, 1);
  const auto s = tokenize("x never seen", v, 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.tokens[1], id_of(SpecialToken::kUnk));
  EXPECT_THROW(tokenize("[MASK] x [MASK]", v, 16), Error);
}

}  // namespace
}  // namespace gemkit
