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

// Forward-pass record shared by the forward and backward implementations.

#ifndef GEMKIT_SRC_MODEL_TAPE_HPP_
#define GEMKIT_SRC_MODEL_TAPE_HPP_

#include <cstddef>
#include <vector>

#include "gemkit/model.hpp"

namespace gemkit::detail {

struct LnCache {
  Vec xhat;
  double rstd = 0.0;
};

struct LstmStep {
  Vec i, f, g, o, c, tc, h;
};

struct Tape {
  HeadMode head = HeadMode::kPrompt;
  std::size_t len = 0;
  bool dropout = false;
  // Scaled keep masks (0 or 1/(1-p)); empty when dropout is off.
  Mat mask_in, mask_align_in, mask_block1;
  Vec mask_block2;

  std::vector<LstmStep> fw, bw;  // bw[j] processed prompt slot n-1-j
  Mat mixed;                     // n_prompt x d

  Mat z;  // token or prompt embedding per position

  // Alignment block over content positions.
  std::vector<std::size_t> left, right;
  Mat el, er;  // normalized embeddings
  std::vector<LnCache> ln_left, ln_right;
  Mat al, ar;  // attention weights
  Mat bl, br;  // aligned summaries
  Vec ml, mr;  // match scalars
  Mat g;       // len x d match features, zero off content
  Mat x1d;     // residual stream after block 1 and dropout

  // Pooling block at the readout position.
  std::size_t readout = 0;
  LnCache ln_r;
  Vec h_r, q;
  std::vector<std::size_t> part;
  std::vector<bool> part_template;
  std::vector<LnCache> ln_part;
  Mat kin, keys, vals;
  Vec alpha, y;
  LnCache ln3;
  Vec n3, u1, a1, y2, yd;
  LnCache lnf;
  Vec hf;
  Vec probs;  // vocabulary or two classes
};

Tape forward(const TokenSequence& seq, const Model& model, ForwardMode mode, HeadMode head);

void backward(const TokenSequence& seq, const Model& model, const Tape& tape, const Vec& dlogits,
              Parameters& grad);

inline constexpr double kLnEps = 1e-5;

}  // namespace gemkit::detail

#endif  // GEMKIT_SRC_MODEL_TAPE_HPP_
