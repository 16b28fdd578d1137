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

#include <sstream>

#include "gemkit/csv.hpp"
#include "gemkit/error.hpp"

namespace gemkit {
namespace {

TEST(Csv, ParsesQuotedFields) {
  auto rows = csv::parse("id,name\n1,\"a, b\"\n2,\"say \"\"hi\"\"\"\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].fields[1], "a, b");
  EXPECT_EQ(rows[2].fields[1], "say \"hi\"");
  EXPECT_EQ(rows[2].line, 3u);
}

TEST(Csv, QuotedFieldSpansLines) {
  auto rows = csv::parse("a,b\n\"x\ny\",z\nq,r\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].fields[0], "x\ny");
  EXPECT_EQ(rows[2].line, 4u);
}

TEST(Csv, HandlesCrLfAndEmptyFields) {
  auto rows = csv::parse("a,b,c\r\n1,,3\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"1", "", "3"}));
}

TEST(Csv, RejectsUnterminatedQuote) {
  EXPECT_THROW(csv::parse("a\n\"open\n"), Error);
}

TEST(Csv, WriteRoundTrips) {
  std::vector<std::vector<std::string>> rows{{"id", "text"}, {"1", "plain"}, {"2", "comma, \"q\"\nline"}};
  std::ostringstream os;
  for (const auto& r : rows) csv::write_row(os, r);
  auto back = csv::parse(os.str());
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(back[i].fields, rows[i]);
}

TEST(Csv, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv::quote("abc"), "abc");
  EXPECT_EQ(csv::quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::quote("a\"b"), "\"a\"\"b\"");
}

}  // namespace
}  // namespace gemkit
