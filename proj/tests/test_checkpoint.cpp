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
#include "gemkit/model.hpp"
#include "test_util.hpp"

namespace gemkit {
namespace {

void expect_mismatch(const std::filesystem::path& p, const ModelConfig& c) {
  try {
    load_checkpoint(p, c);
    FAIL() << "loaded " << p;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
    EXPECT_NE(std::string(e.what()).find("checkpoint shape mismatch"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, RoundTripIsExact) {
  testing::TempDir dir;
  const auto c = testing::tiny_config();
  const Model m = Model::init(c, 7);
  save_checkpoint(m, dir / "m.ckpt");
  const Model back = load_checkpoint(dir / "m.ckpt", c);
  EXPECT_EQ(back.config, c);
  for (const auto& e : kTensors) EXPECT_EQ(back.params.*e.member, m.params.*e.member) << e.name;
  EXPECT_EQ(read_checkpoint_config(dir / "m.ckpt"), c);
  save_checkpoint(back, dir / "n.ckpt");
  EXPECT_EQ(testing::read_file(dir / "m.ckpt"), testing::read_file(dir / "n.ckpt"));
}

TEST(Checkpoint, RejectsOtherShapes) {
  testing::TempDir dir;
  const auto c = testing::tiny_config();
  save_checkpoint(Model::init(c, 7), dir / "m.ckpt");
  auto wider = c;
  wider.dim = 10;
  expect_mismatch(dir / "m.ckpt", wider);
  auto bigger_vocab = c;
  bigger_vocab.vocab_size += 1;
  expect_mismatch(dir / "m.ckpt", bigger_vocab);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  testing::TempDir dir;
  const auto c = testing::tiny_config();
  save_checkpoint(Model::init(c, 7), dir / "m.ckpt");
  const std::string good = testing::read_file(dir / "m.ckpt");
  testing::write_file(dir / "trunc.ckpt", good.substr(0, good.size() / 2));
  expect_mismatch(dir / "trunc.ckpt", c);
  testing::write_file(dir / "junk.ckpt", "hello\nworld\n");
  expect_mismatch(dir / "junk.ckpt", c);
  testing::write_file(dir / "extra.ckpt", good + "x");
  expect_mismatch(dir / "extra.ckpt", c);
  testing::write_file(dir / "empty.ckpt", "");
  expect_mismatch(dir / "empty.ckpt", c);
  EXPECT_THROW(load_checkpoint(dir / "absent.ckpt", c), Error);
}

}  // namespace
}  // namespace gemkit
