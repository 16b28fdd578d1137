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

#include "gemkit/pipeline.hpp"

#include "gemkit/error.hpp"

namespace gemkit {

namespace {

std::string pair_key(const CandidatePair& p) { return p.left_id + '\x1f' + p.right_id; }

void check_splits(const std::vector<const DatasetSplit*>& splits) {
  const auto violations = validate_splits(splits);
  if (!violations.empty()) throw_invalid("invalid splits: " + violations.front().message);
}

}  // namespace

Workspace Workspace::load(const RunConfig& cfg) {
  cfg.check_paths();
  Workspace ws;
  ws.cfg_ = cfg;
  ws.left_ = EntityTable(load_table(cfg.left));
  ws.right_ = EntityTable(load_table(cfg.right));
  ws.train_labeled_ =
      load_pairs(cfg.splits.train_labeled, ws.left_, ws.right_, SplitKind::kTrainLabeled);
  ws.train_unlabeled_ =
      load_pairs(cfg.splits.train_unlabeled, ws.left_, ws.right_, SplitKind::kTrainUnlabeled);
  // Unlabeled pool files may carry a label column; it is never read.
  for (auto& p : ws.train_unlabeled_.pairs) p.label.reset();
  ws.valid_ = load_pairs(cfg.splits.valid, ws.left_, ws.right_, SplitKind::kValid);
  ws.test_ = load_pairs(cfg.splits.test, ws.left_, ws.right_, SplitKind::kTest);
  ws.prepare();
  return ws;
}

Workspace Workspace::from_benchmark(const SynthBenchmark& bench, const RunConfig& cfg) {
  Workspace ws;
  ws.cfg_ = cfg;
  ws.left_ = EntityTable(bench.left);
  ws.right_ = EntityTable(bench.right);
  ws.train_labeled_ = bench.train_labeled;
  ws.train_unlabeled_ = bench.train_unlabeled;
  ws.valid_ = bench.valid;
  ws.test_ = bench.test;
  ws.prepare();
  return ws;
}

void Workspace::prepare() {
  check_splits({&train_labeled_, &train_unlabeled_, &valid_, &test_});
  if (train_labeled_.pairs.empty()) throw_invalid("the labeled training split is empty");

  std::vector<std::string> docs;
  docs.reserve(left_.size() + right_.size());
  for (const auto& e : left_.entities()) docs.push_back(serialize_entity(e));
  for (const auto& e : right_.entities()) docs.push_back(serialize_entity(e));
  stats_ = CorpusStats::build(docs);

  verb_ = cfg_.verbalizer ? Verbalizer::load(*cfg_.verbalizer) : Verbalizer::defaults();
  std::vector<std::string> corpus = docs;
  std::string extra;
  for (const auto& k : {TemplateKind::kHardT1, TemplateKind::kHardT2}) {
    for (const auto& w : PromptTemplate{k}.words()) extra += w + " ";
  }
  for (const auto& ws : verb_.words()) {
    for (const auto& w : ws) extra += w + " ";
  }
  corpus.push_back(extra);
  vocab_ = Vocabulary::build(corpus, 1);
  verb_.resolve(vocab_);
}

ModelConfig Workspace::model_config() const {
  ModelConfig m;
  m.vocab_size = vocab_.size();
  m.dim = cfg_.dim;
  m.ffn_dim = cfg_.ffn_dim;
  m.max_len = cfg_.max_len;
  m.n_prompt = cfg_.mode == RunMode::kPrompt ? cfg_.prompt.n_prompt_tokens() : 0;
  m.dropout = cfg_.train.dropout_rate;
  m.align_temperature = cfg_.align_temperature;
  return m;
}

const TokenSequence& Workspace::encode(const CandidatePair& p) const {
  const std::string key = pair_key(p);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Entity& l = left_.at(p.left_id);
  const Entity& r = right_.at(p.right_id);
  TokenSequence seq =
      cfg_.mode == RunMode::kPrompt
          ? apply_template(l, r, cfg_.prompt, cfg_.max_len, stats_, vocab_)
          : tokenize(serialize_pair(l, r, cfg_.max_len, stats_), vocab_, cfg_.max_len);
  return cache_.emplace(key, std::move(seq)).first->second;
}

Encoder Workspace::encoder() const {
  return [this](const CandidatePair& p) -> const TokenSequence& { return encode(p); };
}

std::vector<Example> Workspace::examples(const std::vector<CandidatePair>& pairs) const {
  std::vector<Example> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.label) throw_invalid("pair " + p.left_id + "," + p.right_id + " has no label");
    out.push_back({encode(p), *p.label});
  }
  return out;
}

std::pair<std::string, std::string> Workspace::preview(const std::string& left_id,
                                                       const std::string& right_id) const {
  const Entity* l = left_.find(left_id);
  if (l == nullptr) throw_invalid("unknown left id " + left_id);
  const Entity* r = right_.find(right_id);
  if (r == nullptr) throw_invalid("unknown right id " + right_id);
  std::string framed = serialize_pair(*l, *r, cfg_.max_len, stats_);
  std::string templated;
  if (cfg_.mode == RunMode::kPrompt) {
    templated = render(template_pieces(*l, *r, cfg_.prompt, cfg_.max_len, stats_));
  }
  return {std::move(framed), std::move(templated)};
}

Prf evaluate_split(const Workspace& ws, const Model& model, const DatasetSplit& split) {
  const auto data = ws.examples(split.pairs);
  return evaluate(model, ws.config().head(), ws.verbalizer().ids(), data);
}

TrainOutcome run_train(const Workspace& ws) {
  const RunConfig& cfg = ws.config();
  const auto data = ws.examples(ws.train_labeled().pairs);
  const auto valid = ws.examples(ws.valid().pairs);
  TrainOutcome out;
  out.result = train(Model::init(ws.model_config(), cfg.seed), cfg.head(), ws.verbalizer().ids(),
                     data, valid, cfg.train);
  out.test = evaluate_split(ws, out.result.best, ws.test());
  return out;
}

SelfTrainOutcome run_selftrain(const Workspace& ws) {
  const RunConfig& cfg = ws.config();
  SelfTrainState state;
  state.labeled = ws.train_labeled().pairs;
  state.unlabeled = ws.train_unlabeled().pairs;
  LstOptions opts;
  opts.config = cfg.selftrain;
  opts.selection = cfg.selection;
  opts.train = cfg.train;
  opts.model = ws.model_config();
  opts.head = cfg.head();
  opts.words = ws.verbalizer().ids();
  const auto valid = ws.examples(ws.valid().pairs);
  SelfTrainOutcome out;
  out.lst = run_lst(std::move(state), valid, ws.encoder(), opts);
  out.test = evaluate_split(ws, out.lst.best, ws.test());
  out.teacher_test = evaluate_split(ws, out.lst.first_teacher, ws.test());
  return out;
}

}  // namespace gemkit
