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

#include "gemkit/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gemkit/error.hpp"

namespace gemkit {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_object(std::string_view text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_invalid(std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw_invalid(std::string(what) + ": expected a JSON object");
  return j;
}

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.contains(it.key())) throw_invalid(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw_invalid(where + ": field '" + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

TableDescriptor read_table(const json& j, const fs::path& base, const std::string& where) {
  if (!j.is_object()) throw_invalid(where + ": expected an object");
  allow_keys(j, {"path", "format", "id_field"}, where);
  if (!j.contains("path")) throw_invalid(where + ": missing 'path'");
  TableDescriptor d;
  std::string path, format = "relational-csv";
  read(j, "path", path, where);
  read(j, "format", format, where);
  read(j, "id_field", d.id_field, where);
  d.path = resolve(base, path);
  d.format = parse_table_format(format);
  return d;
}

ordered_json table_json(const TableDescriptor& d) {
  ordered_json j;
  j["path"] = fs::absolute(d.path).lexically_normal().string();
  j["format"] = std::string(to_string(d.format));
  j["id_field"] = d.id_field;
  return j;
}

std::string abs_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

std::string grid_label(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v.get<double>());
    return buf;
  }
  return v.dump();
}

}  // namespace

RunMode parse_run_mode(std::string_view s) {
  if (s == "prompt") return RunMode::kPrompt;
  if (s == "finetune-baseline") return RunMode::kFinetuneBaseline;
  throw_invalid("unknown mode '" + std::string(s) + "'");
}

const char* to_string(RunMode m) {
  return m == RunMode::kPrompt ? "prompt" : "finetune-baseline";
}

RunConfig RunConfig::from_json_text(std::string_view text, const fs::path& base_dir) {
  const json j = parse_object(text, "config");
  allow_keys(j,
             {"left", "right", "splits", "template", "verbalizer", "mode", "max_len", "train",
              "selftrain", "model", "seed", "out"},
             "config");
  RunConfig c;
  if (!j.contains("left") || !j.contains("right") || !j.contains("splits")) {
    throw_invalid("config: 'left', 'right' and 'splits' are required");
  }
  c.left = read_table(j.at("left"), base_dir, "config.left");
  c.right = read_table(j.at("right"), base_dir, "config.right");

  const json& s = j.at("splits");
  if (!s.is_object()) throw_invalid("config.splits: expected an object");
  allow_keys(s, {"train_labeled", "train_unlabeled", "valid", "test"}, "config.splits");
  auto split = [&](const char* key, fs::path& out) {
    if (!s.contains(key)) throw_invalid(std::string("config.splits: missing '") + key + "'");
    std::string p;
    read(s, key, p, "config.splits");
    out = resolve(base_dir, p);
  };
  split("train_labeled", c.splits.train_labeled);
  split("train_unlabeled", c.splits.train_unlabeled);
  split("valid", c.splits.valid);
  split("test", c.splits.test);

  std::string tmpl = to_string(c.prompt.kind), mode = to_string(c.mode);
  read(j, "template", tmpl, "config");
  read(j, "mode", mode, "config");
  c.prompt.kind = parse_template_kind(tmpl);
  c.mode = parse_run_mode(mode);
  if (j.contains("verbalizer") && !j.at("verbalizer").is_null()) {
    std::string v;
    read(j, "verbalizer", v, "config");
    c.verbalizer = resolve(base_dir, v);
  }
  read(j, "max_len", c.max_len, "config");
  read(j, "seed", c.seed, "config");
  std::string out = c.out.string();
  read(j, "out", out, "config");
  c.out = resolve(base_dir, out);

  if (j.contains("train")) {
    const json& t = j.at("train");
    allow_keys(t, {"learning_rate", "batch_size", "epochs", "dropout_rate", "weight_decay"},
               "config.train");
    read(t, "learning_rate", c.train.learning_rate, "config.train");
    read(t, "batch_size", c.train.batch_size, "config.train");
    read(t, "epochs", c.train.epochs, "config.train");
    read(t, "dropout_rate", c.train.dropout_rate, "config.train");
    read(t, "weight_decay", c.train.weight_decay, "config.train");
  }
  if (j.contains("selftrain")) {
    const json& t = j.at("selftrain");
    allow_keys(t,
               {"iterations", "teacher_epochs", "student_epochs", "prune_frequency", "u_r", "e_r",
                "mc_passes", "selection"},
               "config.selftrain");
    read(t, "iterations", c.selftrain.iterations, "config.selftrain");
    read(t, "teacher_epochs", c.selftrain.teacher_epochs, "config.selftrain");
    read(t, "student_epochs", c.selftrain.student_epochs, "config.selftrain");
    read(t, "prune_frequency", c.selftrain.prune_frequency, "config.selftrain");
    read(t, "u_r", c.selftrain.u_r, "config.selftrain");
    read(t, "e_r", c.selftrain.e_r, "config.selftrain");
    read(t, "mc_passes", c.selftrain.mc_passes, "config.selftrain");
    std::string sel = to_string(c.selection);
    read(t, "selection", sel, "config.selftrain");
    c.selection = parse_selection_strategy(sel);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    allow_keys(m, {"dim", "ffn_dim", "temperature"}, "config.model");
    read(m, "dim", c.dim, "config.model");
    read(m, "ffn_dim", c.ffn_dim, "config.model");
    read(m, "temperature", c.align_temperature, "config.model");
  }
  c.set_seed(c.seed);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), fs::absolute(path).parent_path());
}

std::string RunConfig::to_json_text() const {
  ordered_json j;
  j["left"] = table_json(left);
  j["right"] = table_json(right);
  ordered_json s;
  s["train_labeled"] = abs_string(splits.train_labeled);
  s["train_unlabeled"] = abs_string(splits.train_unlabeled);
  s["valid"] = abs_string(splits.valid);
  s["test"] = abs_string(splits.test);
  j["splits"] = s;
  j["template"] = to_string(prompt.kind);
  j["verbalizer"] = verbalizer ? json(abs_string(*verbalizer)) : json(nullptr);
  j["mode"] = to_string(mode);
  j["max_len"] = max_len;
  ordered_json t;
  t["learning_rate"] = train.learning_rate;
  t["batch_size"] = train.batch_size;
  t["epochs"] = train.epochs;
  t["dropout_rate"] = train.dropout_rate;
  t["weight_decay"] = train.weight_decay;
  j["train"] = t;
  ordered_json st;
  st["iterations"] = selftrain.iterations;
  st["teacher_epochs"] = selftrain.teacher_epochs;
  st["student_epochs"] = selftrain.student_epochs;
  st["prune_frequency"] = selftrain.prune_frequency;
  st["u_r"] = selftrain.u_r;
  st["e_r"] = selftrain.e_r;
  st["mc_passes"] = selftrain.mc_passes;
  st["selection"] = to_string(selection);
  j["selftrain"] = st;
  ordered_json m;
  m["dim"] = dim;
  m["ffn_dim"] = ffn_dim;
  m["temperature"] = align_temperature;
  j["model"] = m;
  j["seed"] = seed;
  j["out"] = abs_string(out);
  return j.dump(2);
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  train.seed = s;
  selftrain.seed = s;
}

void RunConfig::validate() const {
  train.validate();
  selftrain.validate();
  if (max_len < 8) throw_invalid("config: max_len must be at least 8");
  if (dim < 2 || dim % 2 != 0) throw_invalid("config.model: dim must be even and at least 2");
  if (ffn_dim == 0) throw_invalid("config.model: ffn_dim must be positive");
  if (!(align_temperature > 0.0)) throw_invalid("config.model: temperature must be positive");
}

void RunConfig::check_paths() const {
  const std::pair<const char*, const fs::path*> inputs[] = {
      {"left table", &left.path},
      {"right table", &right.path},
      {"train_labeled split", &splits.train_labeled},
      {"train_unlabeled split", &splits.train_unlabeled},
      {"valid split", &splits.valid},
      {"test split", &splits.test},
  };
  for (const auto& [what, p] : inputs) {
    if (!fs::exists(*p)) throw_invalid(std::string(what) + " not found: " + p->string());
  }
  if (verbalizer && !fs::exists(*verbalizer)) {
    throw_invalid("verbalizer not found: " + verbalizer->string());
  }
}

RunConfig config_for_benchmark(const BenchmarkFiles& files, const SynthSpec& spec) {
  RunConfig c;
  c.left = {files.left, spec.left_format, "id"};
  c.right = {files.right, spec.right_format, "id"};
  c.splits = {files.train_labeled, files.train_unlabeled, files.valid, files.test};
  c.out = files.left.parent_path() / "run";
  return c;
}

std::vector<std::pair<std::string, std::string>> expand_grid(std::string_view text) {
  const json base = parse_object(text, "config");
  struct Axis {
    std::vector<std::string> path;
    std::vector<json> values;
  };
  std::vector<Axis> axes;
  auto consider = [&](std::vector<std::string> path) {
    const json* node = &base;
    for (const auto& k : path) {
      if (!node->is_object() || !node->contains(k)) return;
      node = &node->at(k);
    }
    if (node->is_array()) {
      if (node->empty()) throw_invalid("config: sweep list '" + path.back() + "' is empty");
      axes.push_back({std::move(path), std::vector<json>(node->begin(), node->end())});
    }
  };
  consider({"template"});
  consider({"selftrain", "u_r"});
  consider({"selftrain", "e_r"});
  if (axes.empty()) return {{"", std::string(text)}};

  std::vector<std::pair<std::string, std::string>> runs;
  std::vector<std::size_t> idx(axes.size(), 0);
  const std::string out = base.value("out", std::string("run"));
  while (true) {
    json cfg = base;
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      json* node = &cfg;
      for (const auto& k : axes[a].path) node = &(*node)[k];
      *node = axes[a].values[idx[a]];
      if (!label.empty()) label += "_";
      label += axes[a].path.back() + "-" + grid_label(axes[a].values[idx[a]]);
    }
    cfg["out"] = (fs::path(out) / label).string();
    runs.emplace_back(label, cfg.dump());
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return runs;
    }
  }
}

SynthSpec synth_spec_from_json_text(std::string_view text) {
  const json j = parse_object(text, "synth spec");
  allow_keys(j,
             {"n_left", "n_right", "n_pairs", "match_rate", "left_format", "right_format", "noise",
              "labeled_rate", "seed"},
             "synth spec");
  SynthSpec s;
  read(j, "n_left", s.n_left, "synth spec");
  read(j, "n_right", s.n_right, "synth spec");
  read(j, "n_pairs", s.n_pairs, "synth spec");
  read(j, "match_rate", s.match_rate, "synth spec");
  read(j, "noise", s.noise, "synth spec");
  read(j, "labeled_rate", s.labeled_rate, "synth spec");
  read(j, "seed", s.seed, "synth spec");
  std::string lf(to_string(s.left_format)), rf(to_string(s.right_format));
  read(j, "left_format", lf, "synth spec");
  read(j, "right_format", rf, "synth spec");
  s.left_format = parse_table_format(lf);
  s.right_format = parse_table_format(rf);
  return s;
}

std::string synth_spec_to_json_text(const SynthSpec& s) {
  ordered_json j;
  j["n_left"] = s.n_left;
  j["n_right"] = s.n_right;
  j["n_pairs"] = s.n_pairs;
  j["match_rate"] = s.match_rate;
  j["left_format"] = std::string(to_string(s.left_format));
  j["right_format"] = std::string(to_string(s.right_format));
  j["noise"] = s.noise;
  j["labeled_rate"] = s.labeled_rate;
  j["seed"] = s.seed;
  return j.dump(2);
}

}  // namespace gemkit
