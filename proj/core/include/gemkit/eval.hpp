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

// Matching metrics, pseudo-label quality rates and best-epoch selection.

#ifndef GEMKIT_EVAL_HPP_
#define GEMKIT_EVAL_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "gemkit/types.hpp"

namespace gemkit {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

// Throws Error(kInvalidInput) on a length mismatch.
ConfusionCounts confusion(std::span<const MatchLabel> preds, std::span<const MatchLabel> golds);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Ratios with a zero denominator are 0.
Prf prf(const ConfusionCounts& c);
Prf prf(std::span<const MatchLabel> preds, std::span<const MatchLabel> golds);

struct Rates {
  double tpr = 0.0;
  double tnr = 0.0;
};

Rates tpr_tnr(const ConfusionCounts& c);
Rates tpr_tnr(std::span<const MatchLabel> pseudo, std::span<const MatchLabel> golds);

// Index of the highest F1; the earliest wins ties. Requires a non-empty list.
std::size_t select_best_epoch(std::span<const double> f1s);

// "precision 0.9123\nrecall ...\nf1 ...\n" and, when given, tpr/tnr lines.
std::string metrics_report(const Prf& m, const std::optional<Rates>& rates = std::nullopt);

}  // namespace gemkit

#endif  // GEMKIT_EVAL_HPP_
