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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "gemkit/model.hpp"
#include "gemkit/rng.hpp"
#include "gemkit/selftrain.hpp"

namespace gemkit {
namespace {

constexpr std::size_t kVocab = 2000;

TokenSequence make_sequence(Rng& rng, std::size_t side_len) {
  TokenSequence s;
  auto push = [&](int tok, Segment seg) {
    s.tokens.push_back(tok);
    s.segments.push_back(seg);
  };
  auto word = [&] { return kNumSpecials + static_cast<int>(rng.index(kVocab - kNumSpecials)); };
  push(id_of(SpecialToken::kCls), Segment::kFrame);
  for (std::size_t i = 0; i < side_len; ++i) push(word(), Segment::kLeft);
  push(id_of(SpecialToken::kPrompt0), Segment::kTemplate);
  s.mask_position = s.tokens.size();
  push(id_of(SpecialToken::kMask), Segment::kTemplate);
  push(id_of(SpecialToken::kPrompt0) + 1, Segment::kTemplate);
  for (std::size_t i = 0; i < side_len; ++i) push(word(), Segment::kRight);
  push(id_of(SpecialToken::kSep), Segment::kFrame);
  return s;
}

Model bench_model() {
  ModelConfig cfg;
  cfg.vocab_size = kVocab;
  return Model::init(cfg, 1);
}

LabelWords bench_words() { return LabelWords{{std::vector<int>{20, 21, 22}, std::vector<int>{23, 24, 25}}}; }

void BM_ForwardMask(benchmark::State& state) {
  Rng rng(1);
  const Model m = bench_model();
  const auto seq = make_sequence(rng, static_cast<std::size_t>(state.range(0)));
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(forward_mask(seq, m, ForwardMode::sampled(k++)));
  state.SetLabel(std::to_string(seq.size()) + " tokens");
}
BENCHMARK(BM_ForwardMask)->Arg(16)->Arg(64)->Arg(128);

void BM_LossAndGrad(benchmark::State& state) {
  Rng rng(2);
  const Model m = bench_model();
  const auto words = bench_words();
  const auto seq = make_sequence(rng, static_cast<std::size_t>(state.range(0)));
  Parameters grad = Parameters::zeros_like(m.params);
  const HeadMode head = state.range(1) == 0 ? HeadMode::kPrompt : HeadMode::kClassifier;
  std::uint64_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(seq, m, head, words, Target::hard(1), ForwardMode::sampled(k++), &grad));
  }
}
BENCHMARK(BM_LossAndGrad)->Args({16, 0})->Args({64, 0})->Args({64, 1});

void BM_UncertaintySelection(benchmark::State& state) {
  Rng rng(3);
  const Model m = bench_model();
  const auto words = bench_words();
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<TokenSequence> seqs;
  std::vector<CandidatePair> pool;
  for (std::size_t i = 0; i < n; ++i) {
    seqs.push_back(make_sequence(rng, 24));
    pool.push_back({std::to_string(i), "r", std::nullopt, false});
  }
  const Encoder enc = [&](const CandidatePair& p) -> const TokenSequence& { return seqs[std::stoul(p.left_id)]; };
  const Scorer scorer = Scorer::of(m, HeadMode::kPrompt, words);
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_select_uncertainty(scorer, pool, enc, 0.1, 10, 7));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_UncertaintySelection)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Prune(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<CandidatePair> labeled;
  std::vector<double> scores;
  for (std::size_t i = 0; i < n; ++i) {
    labeled.push_back({std::to_string(i), "r", MatchLabel::kMatch, false});
    scores.push_back(rng.uniform01());
  }
  for (auto _ : state) benchmark::DoNotOptimize(prune(labeled, 0.2, scores));
}
BENCHMARK(BM_Prune)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace gemkit

BENCHMARK_MAIN();
