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

// Checkpoint layout:
//   line 1  "gemkit-checkpoint 1"
//   line 2  model configuration as one JSON object
//   then per tensor: "<name> <rows> <cols>\n" followed by rows*cols
//   little-endian IEEE doubles in row-major order.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gemkit/error.hpp"
#include "gemkit/model.hpp"

namespace gemkit {

namespace {

constexpr const char* kMagic = "gemkit-checkpoint 1";

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

[[noreturn]] void mismatch(const std::string& detail) {
  throw_invalid("checkpoint shape mismatch: " + detail);
}

nlohmann::ordered_json config_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["vocab_size"] = c.vocab_size;
  j["dim"] = c.dim;
  j["ffn_dim"] = c.ffn_dim;
  j["max_len"] = c.max_len;
  j["n_prompt"] = c.n_prompt;
  j["dropout"] = c.dropout;
  j["align_temperature"] = c.align_temperature;
  return j;
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.dim = j.at("dim").get<std::size_t>();
  c.ffn_dim = j.at("ffn_dim").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.n_prompt = j.at("n_prompt").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.align_temperature = j.at("align_temperature").get<double>();
  return c;
}

ModelConfig read_header(std::istream& in, const std::filesystem::path& path) {
  std::string magic, cfg_line;
  if (!std::getline(in, magic) || magic != kMagic) mismatch(path.string() + " is not a checkpoint");
  if (!std::getline(in, cfg_line)) mismatch("missing configuration line");
  try {
    return config_from_json(nlohmann::json::parse(cfg_line));
  } catch (const nlohmann::json::exception& e) {
    mismatch(std::string("bad configuration line: ") + e.what());
  }
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInternal, "cannot write checkpoint " + path.string());
  out << kMagic << '\n' << config_json(model.config).dump() << '\n';
  for (const auto& entry : kTensors) {
    const Mat& m = model.params.*entry.member;
    out << entry.name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorKind::kInternal, "failed writing checkpoint " + path.string());
}

ModelConfig read_checkpoint_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid("cannot open checkpoint " + path.string());
  return read_header(in, path);
}

Model load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid("cannot open checkpoint " + path.string());
  Model model;
  model.config = read_header(in, path);
  try {
    model.config.validate();
  } catch (const Error& e) {
    mismatch(e.what());
  }
  const auto want = tensor_shapes(expected);
  const auto have = tensor_shapes(model.config);
  for (std::size_t i = 0; i < kTensors.size(); ++i) {
    const auto& entry = kTensors[i];
    std::string line;
    if (!std::getline(in, line)) mismatch("truncated before tensor " + std::string(entry.name));
    std::istringstream hs(line);
    std::string name;
    Eigen::Index rows = -1, cols = -1;
    hs >> name >> rows >> cols;
    if (name != entry.name) mismatch("expected tensor " + std::string(entry.name) + ", found '" + name + "'");
    if (rows != want[i].first || cols != want[i].second || rows != have[i].first ||
        cols != have[i].second) {
      mismatch(std::string(entry.name) + " is " + std::to_string(rows) + "x" +
               std::to_string(cols) + ", expected " + std::to_string(want[i].first) + "x" +
               std::to_string(want[i].second));
    }
    Mat m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) mismatch("truncated tensor " + std::string(entry.name));
    model.params.*entry.member = std::move(m);
  }
  if (in.peek() != std::char_traits<char>::eof()) mismatch("trailing bytes after last tensor");
  if (!model.params.all_finite()) mismatch("non-finite values");
  return model;
}

}  // namespace gemkit
