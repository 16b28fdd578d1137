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

// A small masked-token scorer trained from random initialization.
//
// Encoder layout (d = embedding width):
//   * token + position embeddings; continuous prompt slots take their vectors
//     from trainable prompt embeddings refined by a bidirectional LSTM;
//   * block 1, alignment attention: every left-entity token attends over the
//     right-entity tokens (and vice versa) on layer-normalized token
//     embeddings; the agreement between a token and its aligned summary is
//     written into the residual stream along a learned direction;
//   * block 2, pooling attention + feed-forward: the readout position ([MASK]
//     or [CLS]) attends over the entity tokens' match features and the
//     template tokens;
//   * tied output projection onto the vocabulary, or a 2-way classifier head
//     over the [CLS] position.
// Dropout follows the embeddings and each block, so stochastic passes have
// several independent noise sites.

#ifndef GEMKIT_MODEL_HPP_
#define GEMKIT_MODEL_HPP_

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gemkit/vocab.hpp"

namespace gemkit {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t dim = 64;
  std::size_t ffn_dim = 256;
  std::size_t max_len = 512;
  // Trainable continuous prompt vectors; 0 disables the prompt mixer.
  std::size_t n_prompt = 2;
  double dropout = 0.1;
  // Sharpness of the alignment attention.
  double align_temperature = 2.0;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct Parameters {
  Mat tok_emb;     // V x d, tied with the output projection
  Mat pos_emb;     // max_len x d
  Mat prompt_emb;  // n_prompt x d
  Mat lstm_fw_wx, lstm_fw_wh, lstm_fw_b;  // 4h x d, 4h x h, 1 x 4h  (h = d/2)
  Mat lstm_bw_wx, lstm_bw_wh, lstm_bw_b;
  Mat match_dir;  // 1 x d
  Mat ln_pool_g, ln_pool_b;
  Mat q_w, q_b, k_w, v_w, v_b;  // no key bias: softmax would cancel it
  Mat ln_ffn_g, ln_ffn_b;
  Mat ffn1_w, ffn1_b, ffn2_w, ffn2_b;
  Mat ln_out_g, ln_out_b;
  Mat out_bias;  // 1 x V
  Mat cls_w;     // 2 x d
  Mat cls_b;     // 1 x 2

  // Same shapes as `like`, all zeros.
  static Parameters zeros_like(const Parameters& like);
  void set_zero();
  bool all_finite() const;
  std::size_t count() const;
};

struct TensorEntry {
  std::string_view name;
  Mat Parameters::*member;
};

// Every tensor, in checkpoint order.
inline constexpr std::array<TensorEntry, 28> kTensors{{
    {"tok_emb", &Parameters::tok_emb},       {"pos_emb", &Parameters::pos_emb},
    {"prompt_emb", &Parameters::prompt_emb}, {"lstm_fw_wx", &Parameters::lstm_fw_wx},
    {"lstm_fw_wh", &Parameters::lstm_fw_wh}, {"lstm_fw_b", &Parameters::lstm_fw_b},
    {"lstm_bw_wx", &Parameters::lstm_bw_wx}, {"lstm_bw_wh", &Parameters::lstm_bw_wh},
    {"lstm_bw_b", &Parameters::lstm_bw_b},   {"match_dir", &Parameters::match_dir},
    {"ln_pool_g", &Parameters::ln_pool_g},   {"ln_pool_b", &Parameters::ln_pool_b},
    {"q_w", &Parameters::q_w},               {"q_b", &Parameters::q_b},
    {"k_w", &Parameters::k_w},
    {"v_w", &Parameters::v_w},               {"v_b", &Parameters::v_b},
    {"ln_ffn_g", &Parameters::ln_ffn_g},     {"ln_ffn_b", &Parameters::ln_ffn_b},
    {"ffn1_w", &Parameters::ffn1_w},         {"ffn1_b", &Parameters::ffn1_b},
    {"ffn2_w", &Parameters::ffn2_w},         {"ffn2_b", &Parameters::ffn2_b},
    {"ln_out_g", &Parameters::ln_out_g},     {"ln_out_b", &Parameters::ln_out_b},
    {"out_bias", &Parameters::out_bias},     {"cls_w", &Parameters::cls_w},
    {"cls_b", &Parameters::cls_b},
}};

// Expected (rows, cols) of every tensor under `cfg`, in kTensors order.
std::array<std::pair<Eigen::Index, Eigen::Index>, kTensors.size()> tensor_shapes(
    const ModelConfig& cfg);

struct Model {
  ModelConfig config;
  Parameters params;

  static Model init(const ModelConfig& cfg, std::uint64_t seed);
};

enum class HeadMode { kPrompt, kClassifier };

// Deterministic passes disable dropout; stochastic passes draw all dropout
// masks from `seed`, so a pass is reproducible from its seed alone.
struct ForwardMode {
  bool stochastic = false;
  std::uint64_t seed = 0;

  static ForwardMode deterministic() { return {}; }
  static ForwardMode sampled(std::uint64_t s) { return {true, s}; }
};

// Probability vector over the vocabulary at the [MASK] position.
Vec forward_mask(const TokenSequence& seq, const Model& model, ForwardMode mode);

// Two-class probabilities from the [CLS] position.
std::array<double, 2> forward_cls(const TokenSequence& seq, const Model& model, ForwardMode mode);

// Training target: a distribution over {mismatch, match}; one-hot for hard
// labels.
struct Target {
  std::array<double, 2> dist{1.0, 0.0};
  static Target hard(int label) {
    return label == 1 ? Target{{0.0, 1.0}} : Target{{1.0, 0.0}};
  }
};

// Label-word ids per class, used by the prompt head's loss.
struct LabelWords {
  std::array<std::vector<int>, 2> ids;
};

// Cross-entropy between `target` and the model's normalized class
// distribution. Prompt mode normalizes the averaged label-word probabilities;
// classifier mode uses the softmax head. When `grad` is non-null, adds
// weight * dLoss/dParams into it. Returns the loss.
double loss_and_grad(const TokenSequence& seq, const Model& model, HeadMode head,
                     const LabelWords& words, const Target& target, ForwardMode mode,
                     Parameters* grad, double weight = 1.0);

// Normalized class distribution (mismatch, match) without gradients.
std::array<double, 2> class_distribution(const TokenSequence& seq, const Model& model,
                                         HeadMode head, const LabelWords& words,
                                         ForwardMode mode);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  // Relative error ||a - n|| / (||a|| + ||n||) per tensor, in kTensors order.
  std::vector<std::pair<std::string, double>> per_tensor;
  double grad_norm = 0.0;
};

// Compares analytic gradients of the summed loss over `batch` to central
// finite differences on every parameter. Meant for tiny models.
GradCheckReport gradient_check(const Model& model, HeadMode head, const LabelWords& words,
                               std::span<const TokenSequence> batch,
                               std::span<const Target> targets,
                               ForwardMode mode = ForwardMode::deterministic(),
                               double step = 1e-4);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
// Throws Error(kInvalidInput, "checkpoint shape mismatch ...") when the file
// does not match `expected`.
Model load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected);
// Reads the configuration stored in a checkpoint header.
ModelConfig read_checkpoint_config(const std::filesystem::path& path);

}  // namespace gemkit

#endif  // GEMKIT_MODEL_HPP_
