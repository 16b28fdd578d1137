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

#include "gemkit/optim.hpp"

#include <cmath>

namespace gemkit {

AdamW::AdamW(const Parameters& like, AdamWConfig cfg)
    : cfg_(cfg), m_(Parameters::zeros_like(like)), v_(Parameters::zeros_like(like)) {}

void AdamW::step(Parameters& params, const Parameters& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double lr = cfg_.learning_rate;
  for (const auto& entry : kTensors) {
    Mat& p = params.*entry.member;
    const Mat& g = grad.*entry.member;
    Mat& m = m_.*entry.member;
    Mat& v = v_.*entry.member;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double gi = g.data()[i];
      double& mi = m.data()[i];
      double& vi = v.data()[i];
      mi = cfg_.beta1 * mi + (1.0 - cfg_.beta1) * gi;
      vi = cfg_.beta2 * vi + (1.0 - cfg_.beta2) * gi * gi;
      double& pi = p.data()[i];
      pi -= lr * cfg_.weight_decay * pi;
      pi -= lr * (mi / c1) / (std::sqrt(vi / c2) + cfg_.eps);
    }
  }
}

}  // namespace gemkit
