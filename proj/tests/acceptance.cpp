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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gemkit/config.hpp"
#include "gemkit/eval.hpp"
#include "gemkit/pipeline.hpp"
#include "gemkit/prompt.hpp"
#include "gemkit/selftrain.hpp"
#include "gemkit/serialize.hpp"
#include "test_util.hpp"

#ifdef GEMKIT_HAVE_CLI
#include "gemkit_cli/commands.hpp"
#endif

namespace gemkit {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d %s: %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Worked serialization examples.
void criterion1() {
  const auto t0 = Clock::now();
  const Entity rel{"r", StructuredBody{{"title", "efficient similarity search and classification via rank aggregation"},
                                       {"authors", "renald fagin , ravi kumar , d. sivakumar"},
                                       {"venue", "SIGMOD"},
                                       {"year", "2003"}}};
  const std::string r = serialize_entity(rel);
  const std::string r_expect =
      "[COL] title [VAL] efficient similarity search and classification via rank aggregation "
      "[COL] authors [VAL] renald fagin , ravi kumar , d. sivakumar [COL] venue [VAL] SIGMOD "
      "[COL] year [VAL] 2003";
  auto sv = [](const char* s) { return SemiValue::scalar(s); };
  const Entity semi{"s", SemiBody{{"title", sv("efficient similarity search and classification via rank aggregation")},
                                  {"authors", SemiValue::list({sv("ronald fagin"), sv("ravi kumar"), sv("d.sivakumar")})},
                                  {"year", sv("2003")}}};
  const std::string s = serialize_entity(semi);
  const bool ok_rel = r == r_expect && r.rfind("[COL] title [VAL] efficient similarity", 0) == 0 &&
                      r.ends_with("[COL] year [VAL] 2003");
  const bool ok_semi = s.find("[COL] authors [VAL] ronald fagin ravi kumar d.sivakumar [COL]") != std::string::npos &&
                       s.rfind("[COL] title [VAL] efficient similarity", 0) == 0 &&
                       s.ends_with("[COL] year [VAL] 2003");
  const double secs = seconds_since(t0);
  report(1, ok_rel && ok_semi && secs < 1.0,
         std::string("relational ") + (ok_rel ? "exact" : "differs") + ", semi " +
             (ok_semi ? "exact" : "differs") + ", " + fmt("%.3fs", secs));
}

// Class scores against a mean-of-word-probabilities oracle.
void criterion2() {
  const auto t0 = Clock::now();
  Rng rng(2002);
  double worst = 0.0;
  std::size_t argmax_flips = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t v = 30 + rng.index(200);
    std::vector<std::string> words;
    for (std::size_t i = kNumSpecials; i < v; ++i) words.push_back("w" + std::to_string(i));
    const auto vocab = Vocabulary::build(std::vector<std::string>{[&] {
      std::string s;
      for (const auto& w : words) s += w + " ";
      return s;
    }()}, 1);
    std::vector<std::size_t> pick(words.size());
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(pick));
    const std::size_t n0 = 1 + rng.index(5), n1 = 1 + rng.index(5);
    std::array<std::vector<std::string>, 2> lw;
    for (std::size_t k = 0; k < n0; ++k) lw[0].push_back(words[pick[k]]);
    for (std::size_t k = 0; k < n1; ++k) lw[1].push_back(words[pick[n0 + k]]);
    Verbalizer verb(lw);
    verb.resolve(vocab);

    std::vector<double> dist(vocab.size());
    double total = 0.0;
    for (auto& x : dist) total += (x = -std::log(1.0 - rng.uniform01()));
    for (auto& x : dist) x /= total;

    const auto got = class_score(dist, verb);
    for (int c = 0; c < 2; ++c) {
      double sum = 0.0;
      for (const auto& w : lw[c]) sum += dist[static_cast<std::size_t>(*vocab.find(w))];
      worst = std::max(worst, std::abs(got[c] - sum / static_cast<double>(lw[c].size())));
    }
    const double scale = std::exp(rng.uniform(-5.0, 5.0));
    std::vector<double> scaled(dist);
    for (auto& x : scaled) x *= scale;
    if (decide(mean_word_scores(scaled, verb.ids())).label != decide(got).label) ++argmax_flips;
  }
  const double secs = seconds_since(t0);
  report(2, worst <= 1e-12 && argmax_flips == 0 && secs < 5.0,
         fmt("max |error| %.3g", worst) + ", argmax changes under rescaling " +
             std::to_string(argmax_flips) + ", " + fmt("%.2fs", secs));
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::size_t> full_sort_pick(const std::vector<double>& keys, double ratio, bool smallest) {
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(keys.size()) * ratio + 1e-9));
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return smallest ? keys[a] < keys[b] : keys[a] > keys[b];
    return a < b;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Selection and pruning against full-sort oracles.
void criterion3() {
  const auto t0 = Clock::now();
  Rng rng(3003);
  std::size_t bad_u = 0, bad_c = 0, bad_p = 0, ties = 0;
  std::vector<TokenSequence> store;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = rng.index(1001);
    const int levels = 1 + static_cast<int>(rng.index(8));
    // Item id in token 0. Items of some classes ignore dropout, giving exact
    // zero-uncertainty ties; the rest draw from a few probability levels.
    const Scorer scorer{[levels](const TokenSequence& seq, ForwardMode mode) -> std::array<double, 2> {
      const auto id = static_cast<std::uint64_t>(seq.tokens[0]);
      std::uint64_t h = mix(id % 13);
      if (mode.stochastic && id % 4 != 0) h = mix(mode.seed ^ (id % 5));
      const double p = static_cast<double>(h % static_cast<std::uint64_t>(levels) + 1) / (levels + 1.0);
      return {1.0 - p, p};
    }};
    store.assign(n, TokenSequence{});
    std::vector<CandidatePair> unl(n);
    for (std::size_t i = 0; i < n; ++i) {
      store[i].tokens = {static_cast<int>(i)};
      store[i].segments = {Segment::kFrame};
      unl[i] = {std::to_string(i), "r", std::nullopt, false};
    }
    const Encoder enc = [&](const CandidatePair& p) -> const TokenSequence& { return store[std::stoul(p.left_id)]; };
    const double ratio = rng.uniform01() * 0.6;
    const int passes = 1 + static_cast<int>(rng.index(10));
    const std::uint64_t seed = rng.next_u64();

    const auto su = pseudo_select_uncertainty(scorer, unl, enc, ratio, passes, seed);
    // Pass values are a / (levels + 1) for integer a, so the variance is
    // computed exactly in integers.
    std::vector<double> u(n, 0.0);
    if (!full_sort_pick(u, ratio, true).empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        long long s1 = 0, s2 = 0;
        for (int k = 0; k < passes; ++k) {
          const double p = scorer(store[i], ForwardMode::sampled(Rng::derive(Rng::derive(seed, i), static_cast<std::uint64_t>(k))))[1];
          const auto a = std::llround(p * (levels + 1));
          s1 += a;
          s2 += a * a;
        }
        const auto num = static_cast<double>(passes * s2 - s1 * s1);
        u[i] = std::sqrt(num) / (static_cast<double>(passes) * (levels + 1));
      }
    }
    bool ok = su.keys.size() == n && su.indices == full_sort_pick(su.keys, ratio, true);
    for (std::size_t i = 0; ok && i < n; ++i) ok = std::abs(su.keys[i] - u[i]) <= 1e-12;
    // Against the exact keys, the selection must be optimal up to float ties:
    // no unselected pair is less uncertain than a selected one.
    if (ok && !su.indices.empty() && su.indices.size() < n) {
      std::vector<bool> in(n, false);
      for (std::size_t i : su.indices) in[i] = true;
      double worst_in = 0.0, best_out = 1e300;
      for (std::size_t i = 0; i < n; ++i) {
        if (in[i]) {
          worst_in = std::max(worst_in, u[i]);
        } else {
          best_out = std::min(best_out, u[i]);
        }
      }
      ok = worst_in <= best_out + 1e-12;
    }
    for (std::size_t k = 0; ok && k < su.indices.size(); ++k) {
      const auto q = scorer(store[su.indices[k]], ForwardMode::deterministic());
      ok = su.pairs[k].label == (q[1] > q[0] ? MatchLabel::kMatch : MatchLabel::kMismatch) && su.pairs[k].pseudo;
    }
    bad_u += !ok;
    ties += std::set<double>(su.keys.begin(), su.keys.end()).size() < su.keys.size();

    const auto sc = pseudo_select_confidence(scorer, unl, enc, ratio);
    std::vector<double> conf(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto q = scorer(store[i], ForwardMode::deterministic());
      conf[i] = std::max(q[0], q[1]);
    }
    bad_c += sc.indices != full_sort_pick(conf, ratio, false);

    std::vector<CandidatePair> lab(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      lab[i] = {std::to_string(i), "r", MatchLabel::kMatch, false};
      scores[i] = static_cast<double>(rng.index(static_cast<std::size_t>(levels) + 1)) / levels;
    }
    const auto pr = prune(lab, ratio, scores);
    const auto expect = full_sort_pick(scores, ratio, true);
    bool okp = pr.pruned_indices == expect && pr.kept.size() + pr.pruned.size() == n;
    for (std::size_t k = 0; okp && k < expect.size(); ++k) okp = pr.pruned[k] == lab[expect[k]];
    bad_p += !okp;
  }
  const double secs = seconds_since(t0);
  report(3, bad_u == 0 && bad_c == 0 && bad_p == 0 && secs < 30.0,
         "mismatches uncertainty " + std::to_string(bad_u) + " confidence " + std::to_string(bad_c) +
             " prune " + std::to_string(bad_p) + " over 1000 instances (" + std::to_string(ties) +
             " with tied keys), " + fmt("%.1fs", secs));
}

// Self-training bookkeeping on a scripted run.
void criterion4() {
  const std::size_t n_l = 57, n_u = 510;
  Rng rng(4004);
  const auto cfg = testing::tiny_config(40, 8);
  std::vector<TokenSequence> seqs;
  SelfTrainState state;
  std::vector<Example> valid;
  for (std::size_t i = 0; i < n_l + n_u + 20; ++i) {
    seqs.push_back(testing::random_sequence(rng, cfg.vocab_size, 2 + rng.index(4), 2 + rng.index(4), true, true));
  }
  for (std::size_t i = 0; i < n_l; ++i) state.labeled.push_back({std::to_string(i), "r", label_from_int(static_cast<long>(rng.index(2))), false});
  for (std::size_t i = n_l; i < n_l + n_u; ++i) state.unlabeled.push_back({std::to_string(i), "r", std::nullopt, false});
  for (std::size_t i = n_l + n_u; i < seqs.size(); ++i) valid.push_back({seqs[i], label_from_int(static_cast<long>(rng.index(2)))});

  LstOptions opts;
  opts.model = cfg;
  opts.words = testing::tiny_words();
  opts.config.u_r = 0.1;
  opts.config.e_r = 0.2;
  opts.config.prune_frequency = 8;
  opts.config.student_epochs = 30;
  std::size_t steps = 0, overlap = 0, conservation = 0;
  opts.observer = [&](const SelfTrainState& s, const std::string&) {
    ++steps;
    std::set<std::string> l;
    for (const auto& p : s.labeled) l.insert(p.left_id);
    for (const auto& p : s.unlabeled) overlap += l.count(p.left_id);
    std::set<std::string> all(l);
    for (const auto& p : s.unlabeled) all.insert(p.left_id);
    for (const auto& p : s.pruned) all.insert(p.left_id);
    if (s.total() != n_l + n_u || all.size() != n_l + n_u) ++conservation;
  };
  const Encoder enc = [&](const CandidatePair& p) -> const TokenSequence& { return seqs[std::stoul(p.left_id)]; };
  const auto r = run_lst(state, valid, enc, opts);
  std::vector<int> prune_epochs;
  for (const auto& line : r.log) {
    const auto at = line.find("\"event\":\"prune\",\"epoch\":");
    if (at != std::string::npos) prune_epochs.push_back(std::stoi(line.substr(at + 24)));
  }
  const std::size_t dp = r.selections.at(0).pairs.size();
  const bool ok = dp == 51 && prune_epochs == std::vector<int>{8, 16, 24} && overlap == 0 &&
                  conservation == 0 && steps == r.log.size();
  std::string epochs;
  for (int e : prune_epochs) epochs += (epochs.empty() ? "" : ",") + std::to_string(e);
  report(4, ok, "|D_P| " + std::to_string(dp) + ", prune epochs {" + epochs + "}, overlap " +
                    std::to_string(overlap) + ", conservation violations " + std::to_string(conservation) +
                    " over " + std::to_string(steps) + " logged steps");
}

// MC statistics.
void criterion5() {
  Rng rng(5005);
  auto cfg = testing::tiny_config(40, 8);
  cfg.dropout = 0.0;
  const Model m = Model::init(cfg, 5);
  const auto words = testing::tiny_words();
  std::vector<TokenSequence> seqs;
  std::vector<CandidatePair> unl;
  for (std::size_t i = 0; i < 100; ++i) {
    seqs.push_back(testing::random_sequence(rng, cfg.vocab_size, 3, 3, true, true));
    unl.push_back({std::to_string(i), "r", std::nullopt, false});
  }
  const Encoder enc = [&](const CandidatePair& p) -> const TokenSequence& { return seqs[std::stoul(p.left_id)]; };
  std::size_t nonzero = 0, differ = 0;
  for (HeadMode head : {HeadMode::kPrompt, HeadMode::kClassifier}) {
    const auto sel = pseudo_select_uncertainty(Scorer::of(m, head, words), unl, enc, 0.5, 10, 77);
    for (double u : sel.keys) nonzero += u != 0.0;
  }
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    differ += forward_mask(seqs[i], m, ForwardMode::sampled(i)) != forward_mask(seqs[i], m, ForwardMode::deterministic());
    differ += forward_cls(seqs[i], m, ForwardMode::sampled(i)) != forward_cls(seqs[i], m, ForwardMode::deterministic());
  }
  const double u = population_std(std::vector<double>{0.6, 0.8});
  const std::vector<std::array<double, 2>> uniform{{0.5, 0.5}};
  const double e = el2n_from_passes(uniform, MatchLabel::kMatch);
  const bool ok = nonzero == 0 && differ == 0 && std::abs(u - 0.1) <= 1e-12 && std::abs(e - std::sqrt(0.5)) <= 1e-12;
  report(5, ok, "nonzero uncertainties " + std::to_string(nonzero) + ", stochastic != deterministic " +
                    std::to_string(differ) + fmt(", u({0.6,0.8}) = %.15f", u) + fmt(", e = %.15f", e));
}

// Gradients against central finite differences.
void criterion6() {
  const auto t0 = Clock::now();
  Rng rng(6006);
  double worst = 0.0, worst_phi = 0.0;
  std::string worst_name;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 4 + 2 * rng.index(7);
    const std::size_t v = kNumSpecials + 4 + rng.index(50 - kNumSpecials - 3);
    auto cfg = testing::tiny_config(v, d);
    cfg.ffn_dim = 2 + rng.index(2 * d);
    cfg.max_len = 16;
    const Model m = Model::init(cfg, 100 + static_cast<std::uint64_t>(t));
    const HeadMode head = t % 4 == 3 ? HeadMode::kClassifier : HeadMode::kPrompt;
    std::vector<TokenSequence> batch;
    std::vector<Target> targets;
    for (int k = 0; k < 2; ++k) {
      batch.push_back(testing::random_sequence(rng, v, 1 + rng.index(4), 1 + rng.index(4), true, true));
      const double y = rng.uniform01();
      targets.push_back(k == 0 ? Target::hard(static_cast<int>(rng.index(2))) : Target{{1.0 - y, y}});
    }
    const auto rep = gradient_check(m, head, testing::tiny_words(), batch, targets, ForwardMode::sampled(static_cast<std::uint64_t>(t)));
    if (rep.max_rel_error > worst) {
      worst = rep.max_rel_error;
      worst_name = rep.worst_tensor;
    }
    for (const auto& [name, err] : rep.per_tensor) {
      if (name == "prompt_emb") worst_phi = std::max(worst_phi, err);
    }
  }
  const double secs = seconds_since(t0);
  report(6, worst < 1e-4 && worst_phi < 1e-4 && secs < 60.0,
         fmt("max relative error %.2e", worst) + " (" + worst_name + ")" +
             fmt(", prompt embeddings %.2e", worst_phi) + fmt(", %.1fs", secs));
}

struct BenchRun {
  double f1 = 0.0;
  double teacher_f1 = 0.0;
  std::size_t student_steps = 0;
  double seconds = 0.0;
  LstResult lst;
};

RunConfig benchmark_config(const testing::TempDir& dir, std::uint64_t seed, double labeled_rate,
                           SynthSpec* spec_out = nullptr) {
  SynthSpec spec;
  spec.seed = seed;
  spec.labeled_rate = labeled_rate;
  const auto files = write_benchmark(gen_synthetic(spec), spec, dir / ("bench" + std::to_string(seed)));
  RunConfig cfg = config_for_benchmark(files, spec);
  cfg.set_seed(seed);
  if (spec_out) *spec_out = spec;
  return cfg;
}

BenchRun run_benchmark(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Workspace ws = Workspace::load(cfg);
  auto out = run_selftrain(ws);
  BenchRun r;
  r.f1 = out.test.f1;
  r.teacher_f1 = out.teacher_test.f1;
  r.student_steps = out.lst.student_steps;
  r.lst = std::move(out.lst);
  r.seconds = seconds_since(t0);
  return r;
}

std::string list(const std::vector<double>& xs, const char* f = "%.3f") {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : " ") + fmt(f, x);
  return s;
}

// End-to-end benchmark and pruning efficiency.
void criteria7and9(const testing::TempDir& dir) {
  std::vector<double> f1, f1_noprune, secs;
  std::size_t steps = 0, steps_noprune = 0, above = 0;
  double worst_drop = -1.0, min_cut = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig cfg = benchmark_config(dir, seed, 0.1);
    const auto a = run_benchmark(cfg);
    cfg.selftrain.e_r = 0.0;
    const auto b = run_benchmark(cfg);
    f1.push_back(a.f1);
    f1_noprune.push_back(b.f1);
    secs.push_back(a.seconds);
    above += a.f1 >= 0.90;
    steps += a.student_steps;
    steps_noprune += b.student_steps;
    worst_drop = std::max(worst_drop, b.f1 - a.f1);
    min_cut = std::min(min_cut, 1.0 - static_cast<double>(a.student_steps) / static_cast<double>(b.student_steps));
  }
  const double max_secs = *std::max_element(secs.begin(), secs.end());
  report(7, above >= 4 && max_secs < 300.0,
         "test F1 [" + list(f1) + "], " + std::to_string(above) + "/5 >= 0.90, slowest run " + fmt("%.1fs", max_secs));
  const double cut = 1.0 - static_cast<double>(steps) / static_cast<double>(steps_noprune);
  report(9, cut >= 0.10 && min_cut >= 0.10 && worst_drop <= 0.02,
         "student steps " + std::to_string(steps) + " vs " + std::to_string(steps_noprune) +
             fmt(" (%.1f%% fewer", 100.0 * cut) + fmt(", per-seed min %.1f%%)", 100.0 * min_cut) +
             ", F1 with pruning [" + list(f1) + "] without [" + list(f1_noprune) + "]" +
             fmt(", worst drop %.3f", worst_drop));
}

// Self-training direction at 5% labels.
void criterion8(const testing::TempDir& dir) {
  std::vector<double> student, teacher, unc, conf;
  std::size_t not_worse = 0, better = 0, unc_ge = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthSpec spec;
    const RunConfig cfg = benchmark_config(dir, 100 + seed, 0.05, &spec);
    RunConfig c = cfg;
    c.set_seed(seed);
    const Workspace ws = Workspace::load(c);
    const auto out = run_selftrain(ws);
    student.push_back(out.test.f1);
    teacher.push_back(out.teacher_test.f1);
    not_worse += out.test.f1 >= out.teacher_test.f1 - 0.01;
    better += out.test.f1 > out.teacher_test.f1;

    // Pseudo-label quality against the hidden golds, same teacher, equal ratio.
    const auto bench = gen_synthetic(spec);
    auto quality = [&](const Selection& s) {
      std::vector<MatchLabel> p, g;
      for (std::size_t k = 0; k < s.indices.size(); ++k) {
        p.push_back(*s.pairs[k].label);
        g.push_back(bench.unlabeled_gold[s.indices[k]]);
      }
      const auto r = tpr_tnr(p, g);
      return (r.tpr + r.tnr) / 2.0;
    };
    const double qu = quality(out.lst.selections.at(0));
    const auto sc = pseudo_select_confidence(Scorer::of(out.lst.first_teacher, c.head(), ws.verbalizer().ids()),
                                             ws.train_unlabeled().pairs, ws.encoder(), c.selftrain.u_r);
    const double qc = quality(sc);
    unc.push_back(qu);
    conf.push_back(qc);
    unc_ge += qu >= qc;
  }
  report(8, not_worse == 5 && better >= 3 && unc_ge >= 4,
         "(a) student F1 [" + list(student) + "] teacher F1 [" + list(teacher) + "], not worse " +
             std::to_string(not_worse) + "/5, strictly better " + std::to_string(better) +
             "/5; (b) mean(TPR,TNR) uncertainty [" + list(unc) + "] confidence [" + list(conf) +
             "], uncertainty >= confidence " + std::to_string(unc_ge) + "/5");
}

// Two full self-training runs with the same configuration and seed.
void criterion10(const testing::TempDir& dir) {
  const RunConfig cfg = benchmark_config(dir, 1, 0.1);
  const auto cfg_path = dir / "determinism.json";
  testing::write_file(cfg_path, cfg.to_json_text());
  std::string detail;
  bool ok = true;
#ifdef GEMKIT_HAVE_CLI
  for (const char* name : {"det_a", "det_b"}) {
    const std::string config = cfg_path.string(), out = (dir / name).string();
    const char* argv[] = {"gemkit", "selftrain", "--config", config.c_str(), "--out", out.c_str()};
    std::ostringstream o, e;
    const int code = cli::run(6, argv, o, e);
    if (code != 0) {
      ok = false;
      detail += std::string(name) + " exited " + std::to_string(code) + " " + e.str();
    }
  }
  detail += "command-line runs";
#else
  for (const char* name : {"det_a", "det_b"}) {
    RunConfig c = RunConfig::load(cfg_path);
    c.out = dir / name;
    const auto out = run_selftrain(Workspace::load(c));
    std::filesystem::create_directories(c.out);
    save_checkpoint(out.lst.best, c.out / "model.ckpt");
    testing::write_file(c.out / "metrics.txt", metrics_report(out.test));
  }
  detail += "library runs";
#endif
  for (const char* f : {"metrics.txt", "model.ckpt"}) {
    const auto a = testing::read_file(dir / "det_a" / f), b = testing::read_file(dir / "det_b" / f);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += std::string(", ") + f + (same ? " identical" : " differ") + " (" + std::to_string(a.size()) + " bytes)";
  }
  report(10, ok, detail);
}

}  // namespace
}  // namespace gemkit

int main() {
  using namespace gemkit;
  const testing::TempDir dir;
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criteria7and9(dir);
  criterion8(dir);
  criterion10(dir);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
