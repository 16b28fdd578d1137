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

// Decoupled-weight-decay Adam.

#ifndef GEMKIT_OPTIM_HPP_
#define GEMKIT_OPTIM_HPP_

#include "gemkit/model.hpp"

namespace gemkit {

struct AdamWConfig {
  double learning_rate = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

class AdamW {
 public:
  AdamW(const Parameters& like, AdamWConfig cfg);

  // p <- p - lr * (wd * p + m_hat / (sqrt(v_hat) + eps))
  void step(Parameters& params, const Parameters& grad);

  long steps() const { return t_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  AdamWConfig cfg_;
  Parameters m_, v_;
  long t_ = 0;
};

}  // namespace gemkit

#endif  // GEMKIT_OPTIM_HPP_
