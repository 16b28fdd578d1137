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

#include "gemkit/selftrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "gemkit/error.hpp"
#include "gemkit/rng.hpp"

namespace gemkit {

namespace {

std::vector<std::size_t> select_by(std::span<const double> keys, double ratio, bool smallest) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw_invalid("selection ratio must be in [0, 1]");
  const std::size_t k = top_count(keys.size(), ratio);
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return smallest ? keys[a] < keys[b] : keys[a] > keys[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    before);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

Selection finish_selection(const Scorer& teacher, std::span<const CandidatePair> unlabeled,
                           const Encoder& encode, std::vector<double> keys, bool smallest,
                           double ratio) {
  Selection sel;
  sel.indices = select_by(keys, ratio, smallest);
  for (std::size_t i : sel.indices) {
    const auto q = teacher(encode(unlabeled[i]), ForwardMode::deterministic());
    CandidatePair p = unlabeled[i];
    p.label = q[1] > q[0] ? MatchLabel::kMatch : MatchLabel::kMismatch;
    p.pseudo = true;
    sel.pairs.push_back(std::move(p));
  }
  sel.keys = std::move(keys);
  return sel;
}

std::vector<Example> encode_all(std::span<const CandidatePair> pairs, const Encoder& encode) {
  std::vector<Example> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.label) throw_invalid("training pair " + p.left_id + "," + p.right_id + " has no label");
    out.push_back({encode(p), *p.label});
  }
  return out;
}

// Seed streams, offset per iteration.
enum Stream : std::uint64_t {
  kTeacherInit = 1,
  kTeacherTrain,
  kSelect,
  kStudentInit,
  kStudentTrain,
  kPrune,
  kStreamsPerIteration = 16,
};

std::uint64_t stream_seed(std::uint64_t seed, int iteration, Stream s) {
  return Rng::derive(seed, static_cast<std::uint64_t>(iteration) * kStreamsPerIteration + s);
}

}  // namespace

std::size_t top_count(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
}

double population_std(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  // Sorted so that equal multisets give bit-equal results, and shifted by the
  // smallest value so that identical passes give exactly zero.
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double x0 = v[0];
  double mean = 0.0;
  for (double x : v) mean += x - x0;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) {
    const double dev = (x - x0) - mean;
    var += dev * dev;
  }
  return std::sqrt(var / static_cast<double>(xs.size()));
}

double el2n_from_passes(std::span<const std::array<double, 2>> passes, MatchLabel label) {
  if (passes.empty()) return 0.0;
  const int y = to_int(label);
  double total = 0.0;
  for (const auto& p : passes) {
    const double d0 = p[0] - (y == 0 ? 1.0 : 0.0);
    const double d1 = p[1] - (y == 1 ? 1.0 : 0.0);
    total += std::sqrt(d0 * d0 + d1 * d1);
  }
  return total / static_cast<double>(passes.size());
}

std::vector<std::size_t> select_smallest(std::span<const double> keys, double ratio) {
  return select_by(keys, ratio, true);
}

std::vector<std::size_t> select_largest(std::span<const double> keys, double ratio) {
  return select_by(keys, ratio, false);
}

double mc_uncertainty(const Scorer& s, const TokenSequence& seq, int n, std::uint64_t seed,
                      std::vector<double>* log) {
  if (n <= 0) throw_invalid("mc_uncertainty: pass count must be positive");
  std::vector<double> pos;
  pos.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    pos.push_back(s(seq, ForwardMode::sampled(Rng::derive(seed, static_cast<std::uint64_t>(k))))[1]);
  }
  if (log != nullptr) *log = pos;
  return n == 1 ? 0.0 : population_std(pos);
}

double mc_el2n(const Scorer& s, const TokenSequence& seq, std::optional<MatchLabel> label, int n,
               std::uint64_t seed, std::vector<std::array<double, 2>>* log) {
  if (!label) throw_invalid("mc_el2n: pair has no label");
  if (n <= 0) throw_invalid("mc_el2n: pass count must be positive");
  std::vector<std::array<double, 2>> passes;
  passes.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    passes.push_back(s(seq, ForwardMode::sampled(Rng::derive(seed, static_cast<std::uint64_t>(k)))));
  }
  if (log != nullptr) *log = passes;
  return el2n_from_passes(passes, *label);
}

Selection pseudo_select_uncertainty(const Scorer& teacher, std::span<const CandidatePair> unlabeled,
                                    const Encoder& encode, double u_r, int n, std::uint64_t seed) {
  std::vector<double> u;
  if (top_count(unlabeled.size(), u_r) > 0) {
    u.reserve(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      u.push_back(mc_uncertainty(teacher, encode(unlabeled[i]), n, Rng::derive(seed, i)));
    }
  } else {
    u.assign(unlabeled.size(), 0.0);
  }
  return finish_selection(teacher, unlabeled, encode, std::move(u), true, u_r);
}

Selection pseudo_select_confidence(const Scorer& teacher, std::span<const CandidatePair> unlabeled,
                                   const Encoder& encode, double ratio) {
  std::vector<double> conf;
  conf.reserve(unlabeled.size());
  for (const auto& p : unlabeled) {
    const auto q = teacher(encode(p), ForwardMode::deterministic());
    conf.push_back(std::max(q[0], q[1]));
  }
  return finish_selection(teacher, unlabeled, encode, std::move(conf), false, ratio);
}

PruneResult prune(std::span<const CandidatePair> labeled, double e_r,
                  std::span<const double> scores) {
  if (scores.size() != labeled.size()) throw_invalid("prune: scores do not cover the labeled set");
  PruneResult r;
  r.pruned_indices = select_smallest(scores, e_r);
  std::size_t next = 0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (next < r.pruned_indices.size() && r.pruned_indices[next] == i) {
      r.pruned.push_back(labeled[i]);
      ++next;
    } else {
      r.kept.push_back(labeled[i]);
    }
  }
  return r;
}

SelectionStrategy parse_selection_strategy(const std::string& s) {
  if (s == "uncertainty") return SelectionStrategy::kUncertainty;
  if (s == "confidence") return SelectionStrategy::kConfidence;
  throw_invalid("unknown selection strategy '" + s + "'");
}

const char* to_string(SelectionStrategy s) {
  return s == SelectionStrategy::kUncertainty ? "uncertainty" : "confidence";
}

LstResult run_lst(SelfTrainState state, std::span<const Example> valid, const Encoder& encode,
                  const LstOptions& opts) {
  const SelfTrainConfig& cfg = opts.config;
  cfg.validate();
  opts.train.validate();
  if (state.labeled.empty()) throw_invalid("self-training needs at least one labeled pair");

  ModelConfig mcfg = opts.model;
  mcfg.dropout = opts.train.dropout_rate;

  LstResult res;
  res.best_valid_f1 = -1.0;
  const std::size_t total = state.total();

  auto record = [&](nlohmann::ordered_json j) {
    if (state.total() != total) throw Error(ErrorKind::kInternal, "self-training lost pairs");
    res.log.push_back(j.dump());
    if (opts.observer) opts.observer(state, res.log.back());
  };
  auto counts = [&](nlohmann::ordered_json& j) {
    j["n_labeled"] = state.labeled.size();
    j["n_unlabeled"] = state.unlabeled.size();
    j["n_pruned"] = state.pruned.size();
  };
  auto metrics = [](nlohmann::ordered_json& j, const std::optional<Prf>& m) {
    if (!m) return;
    j["valid_p"] = m->precision;
    j["valid_r"] = m->recall;
    j["valid_f1"] = m->f1;
  };

  for (int it = 1; it <= cfg.iterations; ++it) {
    // Teacher.
    TrainSpec tspec = opts.train;
    tspec.epochs = cfg.teacher_epochs;
    tspec.seed = stream_seed(cfg.seed, it, kTeacherTrain);
    const auto teacher_data = encode_all(state.labeled, encode);
    const TrainResult teacher =
        train(Model::init(mcfg, stream_seed(cfg.seed, it, kTeacherInit)), opts.head,
              opts.words, teacher_data, valid, tspec);
    res.teacher_steps += teacher.steps;
    for (const auto& rec : teacher.history) {
      nlohmann::ordered_json j;
      j["iteration"] = it;
      j["phase"] = "teacher";
      j["epoch"] = rec.epoch;
      counts(j);
      j["loss"] = rec.loss;
      metrics(j, rec.valid);
      record(std::move(j));
    }
    if (it == 1) res.first_teacher = teacher.best;

    // Pseudo-labels.
    const Scorer ts = Scorer::of(teacher.best, opts.head, opts.words);
    Selection sel =
        opts.selection == SelectionStrategy::kUncertainty
            ? pseudo_select_uncertainty(ts, state.unlabeled, encode, cfg.u_r, cfg.mc_passes,
                                        stream_seed(cfg.seed, it, kSelect))
            : pseudo_select_confidence(ts, state.unlabeled, encode, cfg.u_r);
    {
      std::vector<CandidatePair> rest;
      rest.reserve(state.unlabeled.size() - sel.indices.size());
      std::size_t next = 0;
      for (std::size_t i = 0; i < state.unlabeled.size(); ++i) {
        if (next < sel.indices.size() && sel.indices[next] == i) {
          ++next;
        } else {
          rest.push_back(std::move(state.unlabeled[i]));
        }
      }
      state.unlabeled = std::move(rest);
      state.labeled.insert(state.labeled.end(), sel.pairs.begin(), sel.pairs.end());
    }
    {
      nlohmann::ordered_json j;
      j["iteration"] = it;
      j["event"] = "select";
      j["strategy"] = to_string(opts.selection);
      j["n_selected"] = sel.pairs.size();
      std::size_t pos = 0;
      for (const auto& p : sel.pairs) pos += p.label == MatchLabel::kMatch ? 1 : 0;
      j["n_selected_match"] = pos;
      counts(j);
      record(std::move(j));
    }
    res.selections.push_back(std::move(sel));

    // Student with periodic pruning.
    TrainSpec sspec = opts.train;
    sspec.epochs = cfg.student_epochs;
    sspec.seed = stream_seed(cfg.seed, it, kStudentTrain);
    Trainer trainer(Model::init(mcfg, stream_seed(cfg.seed, it, kStudentInit)), opts.head,
                    opts.words, sspec);
    for (int e = 1; e <= cfg.student_epochs; ++e) {
      const auto data = encode_all(state.labeled, encode);
      const double loss = trainer.run_epoch(data);
      std::optional<Prf> m;
      if (!valid.empty()) {
        m = evaluate(trainer.model(), opts.head, opts.words, valid);
        if (m->f1 > res.best_valid_f1) {
          res.best_valid_f1 = m->f1;
          res.best = trainer.model();
          res.best_iteration = it;
          res.best_epoch = e;
        }
      }
      nlohmann::ordered_json j;
      j["iteration"] = it;
      j["phase"] = "student";
      j["epoch"] = e;
      counts(j);
      j["train_size"] = data.size();
      j["loss"] = loss;
      metrics(j, m);
      record(std::move(j));

      if (cfg.e_r > 0.0 && e % cfg.prune_frequency == 0) {
        const Scorer ss = Scorer::of(trainer.model(), opts.head, opts.words);
        const std::uint64_t base = Rng::derive(stream_seed(cfg.seed, it, kPrune),
                                               static_cast<std::uint64_t>(e));
        std::vector<double> scores;
        scores.reserve(state.labeled.size());
        for (std::size_t i = 0; i < state.labeled.size(); ++i) {
          scores.push_back(mc_el2n(ss, data[i].seq, state.labeled[i].label, cfg.mc_passes,
                                   Rng::derive(base, i)));
        }
        PruneResult pr = prune(state.labeled, cfg.e_r, scores);
        state.labeled = std::move(pr.kept);
        state.pruned.insert(state.pruned.end(), pr.pruned.begin(), pr.pruned.end());
        nlohmann::ordered_json pj;
        pj["iteration"] = it;
        pj["event"] = "prune";
        pj["epoch"] = e;
        pj["n_removed"] = pr.pruned.size();
        counts(pj);
        record(std::move(pj));
      }
    }
    res.student_steps += trainer.steps();
    if (valid.empty()) {
      res.best = trainer.model();
      res.best_iteration = it;
      res.best_epoch = cfg.student_epochs;
    }
  }
  res.state = std::move(state);
  return res;
}

}  // namespace gemkit
