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

#include "gemkit_cli/commands.hpp"

#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gemkit/config.hpp"
#include "gemkit/error.hpp"
#include "gemkit/eval.hpp"
#include "gemkit/ingest.hpp"
#include "gemkit/model.hpp"
#include "gemkit/pipeline.hpp"
#include "gemkit/serialize.hpp"

namespace gemkit::cli {

namespace fs = std::filesystem;

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInvalidInput ? kExitInvalid : kExitInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

std::string read_text(const fs::path& p, const char* what) {
  std::ifstream in(p);
  if (!in) throw_invalid(std::string("cannot open ") + what + " " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInternal, "cannot write " + p.string());
  out << text;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + '\n';
  write_text(p, text);
}

fs::path require_config(const CommonOptions& opts) {
  if (!opts.config) throw_invalid("--config is required");
  return *opts.config;
}

RunConfig apply_overrides(RunConfig cfg, const CommonOptions& opts) {
  if (opts.seed) cfg.set_seed(*opts.seed);
  if (opts.out) cfg.out = *opts.out;
  return cfg;
}

RunConfig load_run_config(const CommonOptions& opts) {
  return apply_overrides(RunConfig::load(require_config(opts)), opts);
}

void save_run_artifacts(const Workspace& ws, const fs::path& dir) {
  fs::create_directories(dir);
  ws.vocab().save(dir / "vocab.txt");
  write_text(dir / "config.json", ws.config().to_json_text() + "\n");
}

std::string format_prf_json(const Prf& m) {
  nlohmann::ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  return j.dump();
}

int selftrain_one(const RunConfig& cfg, std::ostream& out) {
  const Workspace ws = Workspace::load(cfg);
  const SelfTrainOutcome res = run_selftrain(ws);
  save_run_artifacts(ws, cfg.out);
  save_checkpoint(res.lst.best, cfg.out / "model.ckpt");
  write_lines(cfg.out / "rounds.jsonl", res.lst.log);
  std::vector<CandidatePair> pseudo;
  for (const auto& s : res.lst.selections) pseudo.insert(pseudo.end(), s.pairs.begin(), s.pairs.end());
  write_pairs(cfg.out / "pseudo_labels.csv", pseudo, true);

  nlohmann::ordered_json summary;
  summary["best_iteration"] = res.lst.best_iteration;
  summary["best_epoch"] = res.lst.best_epoch;
  summary["best_valid_f1"] = res.lst.best_valid_f1;
  summary["teacher_steps"] = res.lst.teacher_steps;
  summary["student_steps"] = res.lst.student_steps;
  summary["n_labeled"] = res.lst.state.labeled.size();
  summary["n_unlabeled"] = res.lst.state.unlabeled.size();
  summary["n_pruned"] = res.lst.state.pruned.size();
  summary["test"] = nlohmann::ordered_json::parse(format_prf_json(res.test));
  summary["teacher_test"] = nlohmann::ordered_json::parse(format_prf_json(res.teacher_test));
  write_text(cfg.out / "summary.json", summary.dump(2) + "\n");

  const std::string report = metrics_report(res.test);
  write_text(cfg.out / "metrics.txt", report);
  out << report;
  out << "wrote " << (cfg.out / "model.ckpt").string() << '\n';
  return kExitOk;
}

}  // namespace

int cmd_gen_synth(const CommonOptions& opts, bool with_golds, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&] {
    SynthSpec spec;
    if (opts.config) spec = synth_spec_from_json_text(read_text(*opts.config, "synth spec"));
    if (opts.seed) spec.seed = *opts.seed;
    spec.validate();
    const fs::path dir = opts.out.value_or("synth");
    const SynthBenchmark bench = gen_synthetic(spec);
    const BenchmarkFiles files = write_benchmark(bench, spec, dir);
    for (const auto& p : {files.left, files.right, files.train_labeled, files.train_unlabeled,
                          files.valid, files.test}) {
      out << p.string() << '\n';
    }
    if (with_golds) {
      std::vector<CandidatePair> gold = bench.train_unlabeled.pairs;
      for (std::size_t i = 0; i < gold.size(); ++i) gold[i].label = bench.unlabeled_gold[i];
      const fs::path p = dir / "train_unlabeled_gold.csv";
      write_pairs(p, gold, true);
      out << p.string() << '\n';
    }
    return kExitOk;
  });
}

int cmd_serialize(const CommonOptions& opts, const std::string& left_id,
                  const std::string& right_id, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Workspace ws = Workspace::load(load_run_config(opts));
    const Entity* l = ws.left().find(left_id);
    if (l == nullptr) throw_invalid("unknown left id " + left_id);
    const Entity* r = ws.right().find(right_id);
    if (r == nullptr) throw_invalid("unknown right id " + right_id);
    const auto [framed, templated] = ws.preview(left_id, right_id);
    out << "left: " << serialize_entity(*l) << '\n';
    out << "right: " << serialize_entity(*r) << '\n';
    out << "pair: " << framed << '\n';
    out << "pair_tokens: " << count_tokens(framed) << '\n';
    if (!templated.empty()) {
      out << "template: " << templated << '\n';
      out << "template_tokens: " << count_tokens(templated) << '\n';
    }
    return kExitOk;
  });
}

int cmd_train(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_run_config(opts);
    const Workspace ws = Workspace::load(cfg);
    const TrainOutcome res = run_train(ws);
    save_run_artifacts(ws, cfg.out);
    save_checkpoint(res.result.best, cfg.out / "model.ckpt");
    std::vector<std::string> history;
    for (const auto& rec : res.result.history) {
      nlohmann::ordered_json j;
      j["epoch"] = rec.epoch;
      j["train_size"] = rec.train_size;
      j["loss"] = rec.loss;
      if (rec.valid) {
        j["valid_p"] = rec.valid->precision;
        j["valid_r"] = rec.valid->recall;
        j["valid_f1"] = rec.valid->f1;
      }
      history.push_back(j.dump());
    }
    write_lines(cfg.out / "history.jsonl", history);
    const std::string report = metrics_report(res.test);
    write_text(cfg.out / "metrics.txt", report);
    out << report;
    out << "best epoch " << res.result.best_epoch << '\n';
    return kExitOk;
  });
}

int cmd_selftrain(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path path = require_config(opts);
    const fs::path base = fs::absolute(path).parent_path();
    const auto runs = expand_grid(read_text(path, "config"));
    for (const auto& [label, text] : runs) {
      RunConfig cfg = RunConfig::from_json_text(text, base);
      CommonOptions o = opts;
      if (o.out && !label.empty()) o.out = *o.out / label;
      cfg = apply_overrides(std::move(cfg), o);
      if (!label.empty()) out << "run " << label << '\n';
      const int rc = selftrain_one(cfg, out);
      if (rc != kExitOk) return rc;
    }
    return kExitOk;
  });
}

int cmd_evaluate(const CommonOptions& opts, const fs::path& checkpoint,
                 const std::optional<fs::path>& pseudo, const std::optional<fs::path>& golds,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_run_config(opts);
    const Workspace ws = Workspace::load(cfg);
    const Model model = load_checkpoint(checkpoint, ws.model_config());
    const Prf m = evaluate_split(ws, model, ws.test());

    std::optional<Rates> rates;
    if (pseudo.has_value() != golds.has_value()) {
      throw_invalid("--pseudo and --golds must be given together");
    }
    if (pseudo) {
      const DatasetSplit p = load_pairs(*pseudo, ws.left(), ws.right(), SplitKind::kValid);
      const DatasetSplit g = load_pairs(*golds, ws.left(), ws.right(), SplitKind::kValid);
      std::map<std::pair<std::string, std::string>, MatchLabel> gold;
      for (const auto& q : g.pairs) {
        if (!q.label) throw_invalid("gold file has an unlabeled pair");
        gold[{q.left_id, q.right_id}] = *q.label;
      }
      std::vector<MatchLabel> pl, gl;
      for (const auto& q : p.pairs) {
        if (!q.label) throw_invalid("pseudo-label file has an unlabeled pair");
        const auto it = gold.find({q.left_id, q.right_id});
        if (it == gold.end()) {
          throw_invalid("no gold label for pair " + q.left_id + "," + q.right_id);
        }
        pl.push_back(*q.label);
        gl.push_back(it->second);
      }
      rates = tpr_tnr(pl, gl);
    }
    const std::string report = metrics_report(m, rates);
    fs::create_directories(cfg.out);
    write_text(cfg.out / "evaluation.txt", report);
    out << report;
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gemkit: low-resource generalized entity matching"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string config, out_dir;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON configuration file");
    sub->add_option("--seed", seed, "Seed overriding the configuration");
    sub->add_option("--out", out_dir, "Output directory overriding the configuration");
  };

  bool with_golds = false;
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic benchmark");
  add_common(gen);
  gen->add_flag("--with-golds", with_golds, "Also write hidden gold labels of the unlabeled pool");

  std::string left_id, right_id;
  auto* ser = app.add_subcommand("serialize", "Print the serialized and templated form of a pair");
  add_common(ser);
  ser->add_option("--left", left_id, "Left entity id")->required();
  ser->add_option("--right", right_id, "Right entity id")->required();

  auto* trn = app.add_subcommand("train", "Train on the labeled split only");
  add_common(trn);

  auto* st = app.add_subcommand("selftrain", "Run teacher/student self-training");
  add_common(st);

  std::string ckpt, pseudo, golds;
  auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test split");
  add_common(ev);
  ev->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  ev->add_option("--pseudo", pseudo, "Pseudo-label pairs CSV");
  ev->add_option("--golds", golds, "Gold labels for the pseudo-labeled pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  auto pick = [&](CLI::App* sub) {
    if (sub->count("--config") > 0) common.config = config;
    if (sub->count("--seed") > 0) common.seed = seed;
    if (sub->count("--out") > 0) common.out = out_dir;
  };

  if (gen->parsed()) {
    pick(gen);
    return cmd_gen_synth(common, with_golds, out, err);
  }
  if (ser->parsed()) {
    pick(ser);
    return cmd_serialize(common, left_id, right_id, out, err);
  }
  if (trn->parsed()) {
    pick(trn);
    return cmd_train(common, out, err);
  }
  if (st->parsed()) {
    pick(st);
    return cmd_selftrain(common, out, err);
  }
  pick(ev);
  std::optional<fs::path> p, g;
  if (ev->count("--pseudo") > 0) p = pseudo;
  if (ev->count("--golds") > 0) g = golds;
  return cmd_evaluate(common, ckpt, p, g, out, err);
}

}  // namespace gemkit::cli
