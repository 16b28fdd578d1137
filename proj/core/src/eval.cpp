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

#include "gemkit/eval.hpp"

#include <cstdio>

#include "gemkit/error.hpp"

namespace gemkit {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(std::span<const MatchLabel> preds, std::span<const MatchLabel> golds) {
  if (preds.size() != golds.size()) {
    throw_invalid("metrics: " + std::to_string(preds.size()) + " predictions for " +
                  std::to_string(golds.size()) + " gold labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == MatchLabel::kMatch;
    const bool g = golds[i] == MatchLabel::kMatch;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Prf prf(const ConfusionCounts& c) {
  Prf m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  const double s = m.precision + m.recall;
  m.f1 = s > 0.0 ? 2.0 * m.precision * m.recall / s : 0.0;
  return m;
}

Prf prf(std::span<const MatchLabel> preds, std::span<const MatchLabel> golds) {
  return prf(confusion(preds, golds));
}

Rates tpr_tnr(const ConfusionCounts& c) {
  return {ratio(c.tp, c.tp + c.fn), ratio(c.tn, c.tn + c.fp)};
}

Rates tpr_tnr(std::span<const MatchLabel> pseudo, std::span<const MatchLabel> golds) {
  return tpr_tnr(confusion(pseudo, golds));
}

std::size_t select_best_epoch(std::span<const double> f1s) {
  if (f1s.empty()) throw_invalid("select_best_epoch: no epochs");
  std::size_t best = 0;
  for (std::size_t i = 1; i < f1s.size(); ++i) {
    if (f1s[i] > f1s[best]) best = i;
  }
  return best;
}

std::string metrics_report(const Prf& m, const std::optional<Rates>& rates) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "precision %.4f\nrecall %.4f\nf1 %.4f\n", m.precision, m.recall,
                m.f1);
  std::string out = buf;
  if (rates) {
    std::snprintf(buf, sizeof buf, "tpr %.4f\ntnr %.4f\n", rates->tpr, rates->tnr);
    out += buf;
  }
  return out;
}

}  // namespace gemkit
