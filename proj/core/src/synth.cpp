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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gemkit/error.hpp"
#include "gemkit/ingest.hpp"
#include "gemkit/rng.hpp"

namespace gemkit {

namespace {

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ra", "ten", "vo", "zu", "pe",
                                      "shi", "dan", "mor", "bel", "qui", "tro", "sa", "nel",
                                      "fa", "gor", "lin", "pu", "wex", "ya", "cor", "dri"};
constexpr const char* kCities[] = {"springfield", "riverton", "lakeside", "hillview", "oakdale",
                                   "maplewood", "fairview", "brookfield", "ashford", "greenville",
                                   "clayton", "milton", "newport", "salem", "kingston",
                                   "dover", "franklin", "georgetown", "hudson", "jackson"};
constexpr const char* kCuisines[] = {"italian", "french", "mexican", "chinese", "thai",
                                     "indian", "american", "japanese", "greek", "spanish",
                                     "korean", "vietnamese", "seafood", "steakhouse", "vegan"};
constexpr const char* kSuffixes[] = {"st", "ave", "blvd", "rd", "way"};

constexpr std::size_t kLexiconSize = 3000;
// Share of non-matching right records that copy the name of some left record
// (chain branches). They become hard negatives.
constexpr double kSiblingRate = 0.6;

template <typename T, std::size_t N>
const char* pick(Rng& rng, const T (&arr)[N]) {
  return arr[rng.index(N)];
}

struct Latent {
  std::string name;
  std::string addr;
  std::string city;
  std::string phone;
  std::string cuisine;
};

class LatentFactory {
 public:
  explicit LatentFactory(Rng& rng) : rng_(rng) {
    std::set<std::string> words;
    while (words.size() < kLexiconSize) {
      std::string w;
      const int n = 2 + static_cast<int>(rng_.index(2));
      for (int i = 0; i < n; ++i) w += pick(rng_, kSyllables);
      words.insert(w);
    }
    lexicon_.assign(words.begin(), words.end());
  }

  Latent fresh() {
    Latent l;
    l.name = name();
    l.addr = address();
    l.city = pick(rng_, kCities);
    l.phone = phone();
    l.cuisine = pick(rng_, kCuisines);
    return l;
  }

  // Another branch of the same chain on the same street: only the street
  // number and the phone differ.
  Latent sibling(const Latent& of) {
    Latent l = of;
    const auto space = of.addr.find(' ');
    l.addr = std::to_string(rng_.range(1, 9999)) + of.addr.substr(space);
    l.phone = phone();
    return l;
  }

 private:
  const std::string& word() { return lexicon_[rng_.index(lexicon_.size())]; }

  std::string name() {
    std::string s = word();
    const int extra = 1 + static_cast<int>(rng_.index(2));
    for (int i = 0; i < extra; ++i) s += " " + word();
    return s;
  }

  std::string address() {
    return std::to_string(rng_.range(1, 9999)) + " " + word() + " " + pick(rng_, kSuffixes);
  }

  std::string phone() {
    return std::to_string(rng_.range(200, 999)) + "-" + std::to_string(rng_.range(200, 999)) +
           "-" + std::to_string(rng_.range(1000, 9999));
  }

  Rng& rng_;
  std::vector<std::string> lexicon_;
};

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

// Token drops and adjacent swaps, each with probability noise/2 per token.
std::string corrupt_value(Rng& rng, const std::string& value, double noise) {
  auto toks = split_ws(value);
  if (noise <= 0.0 || toks.empty()) return value;
  std::vector<std::string> kept;
  for (const auto& t : toks) {
    if (toks.size() > 1 && rng.bernoulli(noise / 2.0)) continue;
    kept.push_back(t);
  }
  if (kept.empty()) kept.push_back(toks.front());
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
    if (rng.bernoulli(noise / 2.0)) std::swap(kept[i], kept[i + 1]);
  }
  std::string out;
  for (const auto& t : kept) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

Latent corrupt(Rng& rng, const Latent& l, double noise) {
  return Latent{corrupt_value(rng, l.name, noise), corrupt_value(rng, l.addr, noise),
                corrupt_value(rng, l.city, noise), corrupt_value(rng, l.phone, noise),
                corrupt_value(rng, l.cuisine, noise)};
}

// Left records keep the base schema; right records use renamed attributes and
// a different layout so the two tables are heterogeneous.
Entity render(const Latent& l, TableFormat format, bool right_side, std::string id) {
  switch (format) {
    case TableFormat::kRelationalCsv: {
      StructuredBody attrs;
      if (!right_side) {
        attrs = {{"name", l.name}, {"addr", l.addr}, {"city", l.city},
                 {"phone", l.phone}, {"type", l.cuisine}};
      } else {
        attrs = {{"title", l.name}, {"category", l.cuisine}, {"address", l.addr},
                 {"location", l.city}, {"telephone", l.phone}};
      }
      return Entity{std::move(id), std::move(attrs)};
    }
    case TableFormat::kSemiJsonl: {
      SemiBody fields;
      if (!right_side) {
        fields.push_back({"name", SemiValue::scalar(l.name)});
        fields.push_back({"location", SemiValue::object({{"addr", SemiValue::scalar(l.addr)},
                                                          {"city", SemiValue::scalar(l.city)}})});
        fields.push_back({"phone", SemiValue::scalar(l.phone)});
        fields.push_back({"type", SemiValue::list({SemiValue::scalar(l.cuisine)})});
      } else {
        fields.push_back({"title", SemiValue::scalar(l.name)});
        fields.push_back(
            {"contact", SemiValue::object({{"address", SemiValue::scalar(l.addr)},
                                           {"telephone", SemiValue::scalar(l.phone)}})});
        fields.push_back({"tags", SemiValue::list({SemiValue::scalar(l.cuisine),
                                                   SemiValue::scalar(l.city)})});
      }
      return Entity{std::move(id), std::move(fields)};
    }
    case TableFormat::kTextLines: {
      std::string text;
      if (!right_side) {
        text = l.name + " , " + l.addr + " , " + l.city + " . phone " + l.phone + " . " +
               l.cuisine + " cuisine";
      } else {
        text = l.name + " is a " + l.cuisine + " restaurant at " + l.addr + " in " + l.city +
               " , call " + l.phone;
      }
      return Entity{std::move(id), TextBody{std::move(text)}};
    }
  }
  throw_internal("unreachable table format");
}

std::string extension(TableFormat f) {
  switch (f) {
    case TableFormat::kRelationalCsv: return ".csv";
    case TableFormat::kSemiJsonl: return ".jsonl";
    case TableFormat::kTextLines: return ".txt";
  }
  return "";
}

}  // namespace

std::size_t SynthSpec::planted_positives() const {
  return static_cast<std::size_t>(std::floor(match_rate * static_cast<double>(n_pairs)));
}

void SynthSpec::validate() const {
  if (n_left == 0 || n_right == 0) throw_invalid("infeasible spec: empty table");
  if (!(match_rate > 0.0 && match_rate < 1.0)) throw_invalid("match_rate must lie in (0,1)");
  if (!(noise >= 0.0 && noise <= 1.0)) throw_invalid("noise must lie in [0,1]");
  if (!(labeled_rate > 0.0 && labeled_rate <= 1.0)) {
    throw_invalid("labeled_rate must lie in (0,1]");
  }
  const double cells = static_cast<double>(n_left) * static_cast<double>(n_right);
  if (static_cast<double>(n_pairs) > cells) {
    throw_invalid("infeasible spec: n_pairs exceeds n_left * n_right");
  }
  if (planted_positives() > std::min(n_left, n_right)) {
    throw_invalid("infeasible spec: more planted matches than entities");
  }
}

SynthBenchmark gen_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  LatentFactory factory(rng);
  const std::size_t n_pos = spec.planted_positives();

  std::vector<Latent> left(spec.n_left);
  for (auto& l : left) l = factory.fresh();

  // right_src[k] = index of the left latent that right latent k copies, or -1.
  std::vector<Latent> right(spec.n_right);
  std::vector<long> match_of(spec.n_right, -1);
  std::vector<long> sibling_of(spec.n_right, -1);
  for (std::size_t k = 0; k < spec.n_right; ++k) {
    if (k < n_pos) {
      right[k] = corrupt(rng, left[k], spec.noise);
      match_of[k] = static_cast<long>(k);
    } else if (rng.bernoulli(kSiblingRate)) {
      const std::size_t src = rng.index(spec.n_left);
      right[k] = factory.sibling(left[src]);
      sibling_of[k] = static_cast<long>(src);
    } else {
      right[k] = factory.fresh();
    }
  }

  // Shuffle both tables so ids carry no information about planted matches.
  std::vector<std::size_t> left_order(spec.n_left), right_order(spec.n_right);
  for (std::size_t i = 0; i < spec.n_left; ++i) left_order[i] = i;
  for (std::size_t i = 0; i < spec.n_right; ++i) right_order[i] = i;
  rng.shuffle(std::span<std::size_t>(left_order));
  rng.shuffle(std::span<std::size_t>(right_order));
  std::vector<std::size_t> left_pos(spec.n_left), right_pos(spec.n_right);
  for (std::size_t p = 0; p < spec.n_left; ++p) left_pos[left_order[p]] = p;
  for (std::size_t p = 0; p < spec.n_right; ++p) right_pos[right_order[p]] = p;

  SynthBenchmark bench;
  bench.left.reserve(spec.n_left);
  bench.right.reserve(spec.n_right);
  for (std::size_t p = 0; p < spec.n_left; ++p) {
    bench.left.push_back(
        render(left[left_order[p]], spec.left_format, false, "a" + std::to_string(p)));
  }
  for (std::size_t p = 0; p < spec.n_right; ++p) {
    bench.right.push_back(
        render(right[right_order[p]], spec.right_format, true, "b" + std::to_string(p)));
  }

  struct Planted {
    std::size_t l, r;
    MatchLabel y;
  };
  std::vector<Planted> pairs;
  std::set<std::pair<std::size_t, std::size_t>> used;
  for (std::size_t k = 0; k < n_pos; ++k) {
    const std::size_t l = left_pos[k], r = right_pos[k];
    pairs.push_back({l, r, MatchLabel::kMatch});
    used.insert({l, r});
  }
  const std::size_t n_neg = spec.n_pairs - n_pos;
  // Hard negatives first: up to a third of the negatives pair a record with
  // its same-name sibling.
  for (std::size_t k = 0; k < spec.n_right && pairs.size() < n_pos + n_neg / 3; ++k) {
    if (sibling_of[k] < 0) continue;
    const std::size_t l = left_pos[static_cast<std::size_t>(sibling_of[k])];
    const std::size_t r = right_pos[k];
    if (used.insert({l, r}).second) pairs.push_back({l, r, MatchLabel::kMismatch});
  }
  while (pairs.size() < spec.n_pairs) {
    const std::size_t li = rng.index(spec.n_left);
    const std::size_t ri = rng.index(spec.n_right);
    if (match_of[ri] == static_cast<long>(li)) continue;
    const std::size_t l = left_pos[li], r = right_pos[ri];
    if (used.insert({l, r}).second) pairs.push_back({l, r, MatchLabel::kMismatch});
  }
  rng.shuffle(std::span<Planted>(pairs));

  const std::size_t n = pairs.size();
  const auto n_pool = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(n)));
  const auto n_valid = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
  const auto n_labeled = std::min(
      n_pool,
      static_cast<std::size_t>(std::llround(spec.labeled_rate * static_cast<double>(n_pool))));

  bench.train_labeled.kind = SplitKind::kTrainLabeled;
  bench.train_unlabeled.kind = SplitKind::kTrainUnlabeled;
  bench.valid.kind = SplitKind::kValid;
  bench.test.kind = SplitKind::kTest;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pl = pairs[i];
    CandidatePair cp{bench.left[pl.l].id, bench.right[pl.r].id, pl.y, false};
    if (i < n_labeled) {
      bench.train_labeled.pairs.push_back(std::move(cp));
    } else if (i < n_pool) {
      cp.label.reset();
      bench.train_unlabeled.pairs.push_back(std::move(cp));
      bench.unlabeled_gold.push_back(pl.y);
    } else if (i < n_pool + n_valid) {
      bench.valid.pairs.push_back(std::move(cp));
    } else {
      bench.test.pairs.push_back(std::move(cp));
    }
  }
  return bench;
}

BenchmarkFiles benchmark_file_names(const SynthSpec& spec) {
  return BenchmarkFiles{"left" + extension(spec.left_format),
                        "right" + extension(spec.right_format),
                        "train_labeled.csv",
                        "train_unlabeled.csv",
                        "valid.csv",
                        "test.csv"};
}

BenchmarkFiles write_benchmark(const SynthBenchmark& bench, const SynthSpec& spec,
                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  BenchmarkFiles f = benchmark_file_names(spec);
  f.left = dir / f.left;
  f.right = dir / f.right;
  f.train_labeled = dir / f.train_labeled;
  f.train_unlabeled = dir / f.train_unlabeled;
  f.valid = dir / f.valid;
  f.test = dir / f.test;
  write_table({f.left, spec.left_format, "id"}, bench.left);
  write_table({f.right, spec.right_format, "id"}, bench.right);
  write_pairs(f.train_labeled, bench.train_labeled.pairs, true);
  write_pairs(f.train_unlabeled, bench.train_unlabeled.pairs, false);
  write_pairs(f.valid, bench.valid.pairs, true);
  write_pairs(f.test, bench.test.pairs, true);
  return f;
}

}  // namespace gemkit
