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
#include <string>

#include "gemkit/error.hpp"
#include "gemkit/model.hpp"
#include "gemkit/rng.hpp"
#include "model_tape.hpp"

namespace gemkit {

namespace {

using detail::LnCache;
using detail::LstmStep;
using detail::Tape;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + 0.044715 * x * x * x)));
}

Vec layer_norm(const Vec& x, LnCache& c) {
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  c.rstd = 1.0 / std::sqrt(var + detail::kLnEps);
  c.xhat = (x.array() - mean) * c.rstd;
  return c.xhat;
}

Vec affine(const Vec& xhat, const Mat& gamma, const Mat& beta) {
  return xhat.cwiseProduct(gamma.row(0).transpose()) + beta.row(0).transpose();
}

void softmax_inplace(Vec& v) {
  const double mx = v.maxCoeff();
  v = (v.array() - mx).exp();
  v /= v.sum();
}

Mat row_softmax(const Mat& s) {
  Mat out(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    out.row(i) = (s.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

Mat keep_mask(Rng& rng, Eigen::Index rows, Eigen::Index cols, double p) {
  Mat m(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform01() >= p ? scale : 0.0;
  }
  return m;
}

void lstm_run(const Mat& wx, const Mat& wh, const Mat& b, const Mat& inputs, bool reverse,
              std::vector<LstmStep>& steps) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index h = wh.cols();
  Vec hp = Vec::Zero(h), cp = Vec::Zero(h);
  steps.clear();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index k = reverse ? n - 1 - j : j;
    const Vec a = wx * inputs.row(k).transpose() + wh * hp + b.row(0).transpose();
    LstmStep s;
    s.i = a.segment(0, h).unaryExpr(&sigmoid);
    s.f = a.segment(h, h).unaryExpr(&sigmoid);
    s.g = a.segment(2 * h, h).array().tanh();
    s.o = a.segment(3 * h, h).unaryExpr(&sigmoid);
    s.c = s.f.cwiseProduct(cp) + s.i.cwiseProduct(s.g);
    s.tc = s.c.array().tanh();
    s.h = s.o.cwiseProduct(s.tc);
    hp = s.h;
    cp = s.c;
    steps.push_back(std::move(s));
  }
}

bool is_content(Segment s) { return s == Segment::kLeft || s == Segment::kRight; }

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size <= static_cast<std::size_t>(kNumSpecials)) {
    throw_invalid("model: vocabulary must hold more than the special tokens");
  }
  if (dim < 2 || dim % 2 != 0) throw_invalid("model: dim must be even and at least 2");
  if (ffn_dim == 0) throw_invalid("model: ffn_dim must be positive");
  if (max_len < 8) throw_invalid("model: max_len must be at least 8");
  if (n_prompt > static_cast<std::size_t>(kMaxPromptTokens)) {
    throw_invalid("model: at most " + std::to_string(kMaxPromptTokens) + " prompt tokens");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw_invalid("model: dropout must be in [0, 1)");
  if (!(align_temperature > 0.0)) throw_invalid("model: temperature must be positive");
}

std::array<std::pair<Eigen::Index, Eigen::Index>, kTensors.size()> tensor_shapes(
    const ModelConfig& cfg) {
  const auto v = static_cast<Eigen::Index>(cfg.vocab_size);
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  const auto f = static_cast<Eigen::Index>(cfg.ffn_dim);
  const auto l = static_cast<Eigen::Index>(cfg.max_len);
  const auto n = static_cast<Eigen::Index>(cfg.n_prompt);
  const Eigen::Index h = d / 2;
  // A model without prompt tokens carries no mixer.
  const Eigen::Index mh = n > 0 ? h : 0;
  const Eigen::Index md = n > 0 ? d : 0;
  return {{
      {v, d}, {l, d}, {n, d},
      {4 * mh, md}, {4 * mh, mh}, {n > 0 ? 1 : 0, 4 * mh},
      {4 * mh, md}, {4 * mh, mh}, {n > 0 ? 1 : 0, 4 * mh},
      {1, d},
      {1, d}, {1, d},
      {d, d}, {1, d}, {d, d}, {d, d}, {1, d},
      {1, d}, {1, d},
      {f, d}, {1, f}, {d, f}, {1, d},
      {1, d}, {1, d},
      {1, v},
      {2, d}, {1, 2},
  }};
}

Parameters Parameters::zeros_like(const Parameters& like) {
  Parameters p;
  for (const auto& t : kTensors) {
    const Mat& src = like.*t.member;
    p.*t.member = Mat::Zero(src.rows(), src.cols());
  }
  return p;
}

void Parameters::set_zero() {
  for (const auto& t : kTensors) (this->*t.member).setZero();
}

bool Parameters::all_finite() const {
  for (const auto& t : kTensors) {
    if (!(this->*t.member).allFinite()) return false;
  }
  return true;
}

std::size_t Parameters::count() const {
  std::size_t n = 0;
  for (const auto& t : kTensors) n += static_cast<std::size_t>((this->*t.member).size());
  return n;
}

Model Model::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Model m;
  m.config = cfg;
  const auto shapes = tensor_shapes(cfg);
  for (std::size_t i = 0; i < kTensors.size(); ++i) {
    m.params.*kTensors[i].member = Mat::Zero(shapes[i].first, shapes[i].second);
  }
  Parameters& p = m.params;
  Rng rng(seed);
  auto uniform = [&](Mat& w, double bound) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
  };
  auto orthogonal_blocks = [&](Mat& w) {
    const Eigen::Index h = w.cols();
    for (Eigen::Index blk = 0; blk * h < w.rows(); ++blk) {
      Eigen::MatrixXd a(h, h);
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
      Eigen::MatrixXd q = qr.householderQ();
      const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (Eigen::Index j = 0; j < h; ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
      }
      w.block(blk * h, 0, h, h) = q;
    }
  };
  const double emb = 0.05;
  const auto d = static_cast<double>(cfg.dim);
  uniform(p.tok_emb, emb);
  uniform(p.pos_emb, emb);
  uniform(p.prompt_emb, emb);
  if (cfg.n_prompt > 0) {
    const double lstm = 1.0 / std::sqrt(d / 2.0);
    uniform(p.lstm_fw_wx, lstm);
    orthogonal_blocks(p.lstm_fw_wh);
    uniform(p.lstm_bw_wx, lstm);
    orthogonal_blocks(p.lstm_bw_wh);
  }
  uniform(p.match_dir, emb);
  const double lin = 1.0 / std::sqrt(d);
  uniform(p.q_w, lin);
  uniform(p.k_w, lin);
  uniform(p.v_w, lin);
  uniform(p.ffn1_w, lin);
  uniform(p.ffn2_w, 1.0 / std::sqrt(static_cast<double>(cfg.ffn_dim)));
  uniform(p.cls_w, lin);
  p.ln_pool_g.setOnes();
  p.ln_ffn_g.setOnes();
  p.ln_out_g.setOnes();
  return m;
}

namespace detail {

Tape forward(const TokenSequence& seq, const Model& model, ForwardMode mode, HeadMode head) {
  const ModelConfig& cfg = model.config;
  const Parameters& p = model.params;
  const std::size_t len = seq.size();
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  const double sqrt_d = std::sqrt(static_cast<double>(cfg.dim));

  if (seq.segments.size() != len) throw_invalid("model: token and segment counts differ");
  if (len == 0) throw_invalid("model: empty sequence");
  if (len > cfg.max_len) {
    throw_invalid("model: sequence of " + std::to_string(len) + " tokens exceeds max_len " +
                  std::to_string(cfg.max_len));
  }

  Tape t;
  t.head = head;
  t.len = len;
  if (head == HeadMode::kPrompt) {
    if (!seq.mask_position) throw_invalid("forward_mask: sequence has no [MASK]");
    t.readout = *seq.mask_position;
  } else {
    if (seq.tokens[0] != id_of(SpecialToken::kCls)) {
      throw_invalid("forward_cls: sequence must begin with [CLS]");
    }
    t.readout = 0;
  }

  t.dropout = mode.stochastic && cfg.dropout > 0.0;
  const auto rows = static_cast<Eigen::Index>(len);
  if (t.dropout) {
    Rng rng(mode.seed);
    t.mask_in = keep_mask(rng, rows, d, cfg.dropout);
    t.mask_align_in = keep_mask(rng, rows, d, cfg.dropout);
    t.mask_block1 = keep_mask(rng, rows, d, cfg.dropout);
    t.mask_block2 = keep_mask(rng, d, 1, cfg.dropout).col(0);
  }

  // Prompt mixer.
  if (cfg.n_prompt > 0) {
    lstm_run(p.lstm_fw_wx, p.lstm_fw_wh, p.lstm_fw_b, p.prompt_emb, false, t.fw);
    lstm_run(p.lstm_bw_wx, p.lstm_bw_wh, p.lstm_bw_b, p.prompt_emb, true, t.bw);
    const auto n = static_cast<Eigen::Index>(cfg.n_prompt);
    const Eigen::Index h = d / 2;
    t.mixed = p.prompt_emb;
    for (Eigen::Index k = 0; k < n; ++k) {
      t.mixed.row(k).segment(0, h) += t.fw[k].h.transpose();
      t.mixed.row(k).segment(h, h) += t.bw[n - 1 - k].h.transpose();
    }
  }

  // Embeddings.
  t.z.resize(rows, d);
  for (std::size_t i = 0; i < len; ++i) {
    const int id = seq.tokens[i];
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw_invalid("model: token id " + std::to_string(id) + " outside the vocabulary");
    }
    const int slot = Vocabulary::prompt_slot(id);
    if (slot >= 0) {
      if (static_cast<std::size_t>(slot) >= cfg.n_prompt) {
        throw_invalid("model: " + prompt_marker(slot) + " has no trained prompt embedding");
      }
      t.z.row(static_cast<Eigen::Index>(i)) = t.mixed.row(slot);
    } else {
      t.z.row(static_cast<Eigen::Index>(i)) = p.tok_emb.row(id);
    }
    if (seq.segments[i] == Segment::kLeft) t.left.push_back(i);
    if (seq.segments[i] == Segment::kRight) t.right.push_back(i);
  }
  Mat x0 = t.z + p.pos_emb.topRows(rows);
  if (t.dropout) x0 = x0.cwiseProduct(t.mask_in);

  // Block 1: cross-entity alignment.
  auto normalized = [&](const std::vector<std::size_t>& pos, std::vector<LnCache>& caches) {
    Mat e(static_cast<Eigen::Index>(pos.size()), d);
    caches.resize(pos.size());
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const auto r = static_cast<Eigen::Index>(pos[k]);
      Vec zb = t.z.row(r).transpose();
      if (t.dropout) zb = zb.cwiseProduct(t.mask_align_in.row(r).transpose());
      e.row(static_cast<Eigen::Index>(k)) = layer_norm(zb, caches[k]).transpose();
    }
    return e;
  };
  t.el = normalized(t.left, t.ln_left);
  t.er = normalized(t.right, t.ln_right);
  const auto nl = static_cast<Eigen::Index>(t.left.size());
  const auto nr = static_cast<Eigen::Index>(t.right.size());
  t.ml = Vec::Zero(nl);
  t.mr = Vec::Zero(nr);
  if (nl > 0 && nr > 0) {
    const Mat s = (cfg.align_temperature / sqrt_d) * (t.el * t.er.transpose());
    t.al = row_softmax(s);
    t.ar = row_softmax(s.transpose());
    t.bl = t.al * t.er;
    t.br = t.ar * t.el;
    t.ml = t.el.cwiseProduct(t.bl).rowwise().sum() / static_cast<double>(d);
    t.mr = t.er.cwiseProduct(t.br).rowwise().sum() / static_cast<double>(d);
  }
  t.g = Mat::Zero(rows, d);
  for (Eigen::Index k = 0; k < nl; ++k) {
    t.g.row(static_cast<Eigen::Index>(t.left[k])) = t.ml(k) * p.match_dir.row(0);
  }
  for (Eigen::Index k = 0; k < nr; ++k) {
    t.g.row(static_cast<Eigen::Index>(t.right[k])) = t.mr(k) * p.match_dir.row(0);
  }
  t.x1d = x0 + t.g;
  if (t.dropout) t.x1d = t.x1d.cwiseProduct(t.mask_block1);

  // Block 2: pooling attention from the readout position.
  const Vec x_r = t.x1d.row(static_cast<Eigen::Index>(t.readout)).transpose();
  t.h_r = affine(layer_norm(x_r, t.ln_r), p.ln_pool_g, p.ln_pool_b);
  t.q = p.q_w * t.h_r + p.q_b.row(0).transpose();
  for (std::size_t i = 0; i < len; ++i) {
    if (i == t.readout) continue;
    const Segment s = seq.segments[i];
    if (is_content(s) || s == Segment::kTemplate) {
      t.part.push_back(i);
      t.part_template.push_back(s == Segment::kTemplate);
    }
  }
  const auto np = static_cast<Eigen::Index>(t.part.size());
  t.kin.resize(np, d);
  t.vals.resize(np, d);
  t.ln_part.resize(t.part.size());
  for (Eigen::Index k = 0; k < np; ++k) {
    const auto r = static_cast<Eigen::Index>(t.part[k]);
    if (t.part_template[k]) {
      const Vec xj = t.x1d.row(r).transpose();
      const Vec hj = affine(layer_norm(xj, t.ln_part[k]), p.ln_pool_g, p.ln_pool_b);
      t.kin.row(k) = hj.transpose();
      t.vals.row(k) = (p.v_w * hj + p.v_b.row(0).transpose()).transpose();
    } else {
      t.kin.row(k) = t.g.row(r);
      t.vals.row(k) = t.g.row(r);
    }
  }
  t.y = x_r;
  if (np > 0) {
    t.keys = t.kin * p.k_w.transpose();
    t.alpha = (t.keys * t.q) / sqrt_d;
    softmax_inplace(t.alpha);
    t.y += t.vals.transpose() * t.alpha;
  }
  t.n3 = affine(layer_norm(t.y, t.ln3), p.ln_ffn_g, p.ln_ffn_b);
  t.u1 = p.ffn1_w * t.n3 + p.ffn1_b.row(0).transpose();
  t.a1 = t.u1.unaryExpr(&gelu);
  t.y2 = t.y + p.ffn2_w * t.a1 + p.ffn2_b.row(0).transpose();
  t.yd = t.dropout ? Vec(t.y2.cwiseProduct(t.mask_block2)) : t.y2;
  t.hf = affine(layer_norm(t.yd, t.lnf), p.ln_out_g, p.ln_out_b);

  if (head == HeadMode::kPrompt) {
    t.probs = p.tok_emb * t.hf + p.out_bias.row(0).transpose();
  } else {
    t.probs = p.cls_w * t.hf + p.cls_b.row(0).transpose();
  }
  softmax_inplace(t.probs);
  return t;
}

}  // namespace detail

Vec forward_mask(const TokenSequence& seq, const Model& model, ForwardMode mode) {
  return detail::forward(seq, model, mode, HeadMode::kPrompt).probs;
}

std::array<double, 2> forward_cls(const TokenSequence& seq, const Model& model, ForwardMode mode) {
  const Vec p = detail::forward(seq, model, mode, HeadMode::kClassifier).probs;
  return {p(0), p(1)};
}

namespace {

// Class scores from the head output: mean label-word probability in prompt
// mode, the softmax itself in classifier mode.
std::array<double, 2> head_scores(const Vec& probs, HeadMode head, const LabelWords& words) {
  if (head == HeadMode::kClassifier) return {probs(0), probs(1)};
  std::array<double, 2> s{0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    if (words.ids[c].empty()) throw_invalid("model: class without label words");
    for (int id : words.ids[c]) s[c] += probs(id);
    s[c] /= static_cast<double>(words.ids[c].size());
  }
  return s;
}

}  // namespace

std::array<double, 2> class_distribution(const TokenSequence& seq, const Model& model,
                                         HeadMode head, const LabelWords& words,
                                         ForwardMode mode) {
  const auto t = detail::forward(seq, model, mode, head);
  const auto s = head_scores(t.probs, head, words);
  const double total = s[0] + s[1];
  return {s[0] / total, s[1] / total};
}

double loss_and_grad(const TokenSequence& seq, const Model& model, HeadMode head,
                     const LabelWords& words, const Target& target, ForwardMode mode,
                     Parameters* grad, double weight) {
  const auto t = detail::forward(seq, model, mode, head);
  const auto s = head_scores(t.probs, head, words);
  const double total = s[0] + s[1];
  double loss = 0.0;
  for (int c = 0; c < 2; ++c) {
    if (target.dist[c] > 0.0) loss -= target.dist[c] * std::log(s[c] / total);
  }
  if (grad == nullptr) return loss;

  const double tsum = target.dist[0] + target.dist[1];
  Vec dlogits;
  if (head == HeadMode::kClassifier) {
    dlogits = weight * (tsum * t.probs - Vec(Eigen::Vector2d(target.dist[0], target.dist[1])));
  } else {
    // dL/ds_c = -t_c / s_c + sum(t) / S, spread evenly over the class's words.
    Vec dp = Vec::Zero(t.probs.size());
    for (int c = 0; c < 2; ++c) {
      double ds = tsum / total;
      if (target.dist[c] > 0.0) ds -= target.dist[c] / s[c];
      const double per = ds / static_cast<double>(words.ids[c].size());
      for (int id : words.ids[c]) dp(id) += per;
    }
    dlogits = weight * t.probs.cwiseProduct(dp.array().matrix() - Vec::Constant(dp.size(), t.probs.dot(dp)));
  }
  detail::backward(seq, model, t, dlogits, *grad);
  return loss;
}

}  // namespace gemkit
