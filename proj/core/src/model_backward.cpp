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

#include <cmath>

#include "gemkit/error.hpp"
#include "gemkit/model.hpp"
#include "model_tape.hpp"

namespace gemkit {

namespace detail {

namespace {

constexpr double kGeluC = 0.7978845608028654;

double gelu_grad(double x) {
  const double inner = kGeluC * (x + 0.044715 * x * x * x);
  const double th = std::tanh(inner);
  return 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
}

Vec ln_backward(const Vec& dxhat, const LnCache& c) {
  const auto n = static_cast<double>(dxhat.size());
  const double mean_d = dxhat.mean();
  const double proj = dxhat.dot(c.xhat) / n;
  return c.rstd * (dxhat.array() - mean_d - c.xhat.array() * proj).matrix();
}

// Backpropagates through an affine layer norm; returns d(input).
Vec ln_affine_backward(const Vec& dout, const LnCache& c, const Mat& gamma, Mat& dgamma,
                       Mat& dbeta) {
  dgamma.row(0) += dout.cwiseProduct(c.xhat).transpose();
  dbeta.row(0) += dout.transpose();
  return ln_backward(dout.cwiseProduct(gamma.row(0).transpose()), c);
}

Mat row_softmax_backward(const Mat& a, const Mat& da) {
  Mat out = a.cwiseProduct(da);
  const Vec dots = out.rowwise().sum();
  out -= a.cwiseProduct(dots.replicate(1, a.cols()));
  return out;
}

// dh[k] is the gradient on the hidden output for prompt slot k.
void lstm_backward(const Mat& wx, const Mat& wh, const Mat& inputs,
                   const std::vector<LstmStep>& steps, bool reverse, const Mat& dh_ext,
                   Eigen::Index col0, Mat& dwx, Mat& dwh, Mat& db, Mat& dinputs) {
  const auto n = static_cast<Eigen::Index>(steps.size());
  const Eigen::Index h = wh.cols();
  Vec dh_next = Vec::Zero(h), dc_next = Vec::Zero(h);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const Eigen::Index k = reverse ? n - 1 - j : j;
    const LstmStep& s = steps[static_cast<std::size_t>(j)];
    const Vec hp = j > 0 ? steps[static_cast<std::size_t>(j - 1)].h : Vec::Zero(h);
    const Vec cp = j > 0 ? steps[static_cast<std::size_t>(j - 1)].c : Vec::Zero(h);
    const Vec dh = dh_ext.row(k).segment(col0, h).transpose() + dh_next;
    const Vec dout = dh.cwiseProduct(s.tc);
    const Vec dc =
        dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tc.array().square()).matrix()) + dc_next;
    Vec da(4 * h);
    da.segment(0, h) = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
    da.segment(h, h) = dc.cwiseProduct(cp).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
    da.segment(2 * h, h) = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());
    da.segment(3 * h, h) = dout.cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
    dwx += da * inputs.row(k);
    dwh += da * hp.transpose();
    db.row(0) += da.transpose();
    dinputs.row(k) += (wx.transpose() * da).transpose();
    dh_next = wh.transpose() * da;
    dc_next = dc.cwiseProduct(s.f);
  }
}

}  // namespace

void backward(const TokenSequence& seq, const Model& model, const Tape& t, const Vec& dlogits,
              Parameters& gr) {
  const ModelConfig& cfg = model.config;
  const Parameters& p = model.params;
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  const auto rows = static_cast<Eigen::Index>(t.len);
  const double sqrt_d = std::sqrt(static_cast<double>(cfg.dim));

  // Output head.
  Vec dhf;
  if (t.head == HeadMode::kPrompt) {
    gr.tok_emb += dlogits * t.hf.transpose();
    gr.out_bias.row(0) += dlogits.transpose();
    dhf = p.tok_emb.transpose() * dlogits;
  } else {
    gr.cls_w += dlogits * t.hf.transpose();
    gr.cls_b.row(0) += dlogits.transpose();
    dhf = p.cls_w.transpose() * dlogits;
  }

  // Block 2.
  Vec dyd = ln_affine_backward(dhf, t.lnf, p.ln_out_g, gr.ln_out_g, gr.ln_out_b);
  const Vec dy2 = t.dropout ? Vec(dyd.cwiseProduct(t.mask_block2)) : dyd;
  gr.ffn2_w += dy2 * t.a1.transpose();
  gr.ffn2_b.row(0) += dy2.transpose();
  const Vec da1 = p.ffn2_w.transpose() * dy2;
  const Vec du1 = da1.cwiseProduct(t.u1.unaryExpr(&gelu_grad));
  gr.ffn1_w += du1 * t.n3.transpose();
  gr.ffn1_b.row(0) += du1.transpose();
  const Vec dn3 = p.ffn1_w.transpose() * du1;
  Vec dy = dy2 + ln_affine_backward(dn3, t.ln3, p.ln_ffn_g, gr.ln_ffn_g, gr.ln_ffn_b);

  Mat dx1d = Mat::Zero(rows, d);
  Mat dg = Mat::Zero(rows, d);
  const auto r = static_cast<Eigen::Index>(t.readout);
  dx1d.row(r) += dy.transpose();

  const auto np = static_cast<Eigen::Index>(t.part.size());
  Vec dq = Vec::Zero(d);
  if (np > 0) {
    const Vec dalpha = t.vals * dy;
    const Vec dsc = t.alpha.cwiseProduct((dalpha.array() - t.alpha.dot(dalpha)).matrix()) / sqrt_d;
    dq = t.keys.transpose() * dsc;
    const Mat dkeys = dsc * t.q.transpose();  // np x d
    gr.k_w += dkeys.transpose() * t.kin;
    const Mat dkin = dkeys * p.k_w;
    for (Eigen::Index k = 0; k < np; ++k) {
      const auto pos = static_cast<Eigen::Index>(t.part[static_cast<std::size_t>(k)]);
      const Vec dval = t.alpha(k) * dy;
      if (t.part_template[static_cast<std::size_t>(k)]) {
        const Vec hj = t.kin.row(k).transpose();
        gr.v_w += dval * hj.transpose();
        gr.v_b.row(0) += dval.transpose();
        const Vec dhj = dkin.row(k).transpose() + p.v_w.transpose() * dval;
        dx1d.row(pos) += ln_affine_backward(dhj, t.ln_part[static_cast<std::size_t>(k)],
                                            p.ln_pool_g, gr.ln_pool_g, gr.ln_pool_b)
                             .transpose();
      } else {
        dg.row(pos) += dkin.row(k) + dval.transpose();
      }
    }
  }
  gr.q_w += dq * t.h_r.transpose();
  gr.q_b.row(0) += dq.transpose();
  const Vec dh_r = p.q_w.transpose() * dq;
  dx1d.row(r) += ln_affine_backward(dh_r, t.ln_r, p.ln_pool_g, gr.ln_pool_g, gr.ln_pool_b)
                     .transpose();

  // Block 1.
  const Mat dx1 = t.dropout ? Mat(dx1d.cwiseProduct(t.mask_block1)) : dx1d;
  dg += dx1;
  const Mat dx0 = dx1;

  const auto nl = static_cast<Eigen::Index>(t.left.size());
  const auto nr = static_cast<Eigen::Index>(t.right.size());
  Mat dz = Mat::Zero(rows, d);
  if (nl > 0 && nr > 0) {
    const Vec u = p.match_dir.row(0).transpose();
    Vec dml(nl), dmr(nr);
    for (Eigen::Index k = 0; k < nl; ++k) {
      const auto pos = static_cast<Eigen::Index>(t.left[static_cast<std::size_t>(k)]);
      dml(k) = dg.row(pos).dot(u.transpose());
      gr.match_dir.row(0) += t.ml(k) * dg.row(pos);
    }
    for (Eigen::Index k = 0; k < nr; ++k) {
      const auto pos = static_cast<Eigen::Index>(t.right[static_cast<std::size_t>(k)]);
      dmr(k) = dg.row(pos).dot(u.transpose());
      gr.match_dir.row(0) += t.mr(k) * dg.row(pos);
    }
    const double inv_d = 1.0 / static_cast<double>(d);
    Mat del = (t.bl.array().colwise() * dml.array()).matrix() * inv_d;
    Mat der = (t.br.array().colwise() * dmr.array()).matrix() * inv_d;
    const Mat dbl = (t.el.array().colwise() * dml.array()).matrix() * inv_d;
    const Mat dbr = (t.er.array().colwise() * dmr.array()).matrix() * inv_d;
    // bl = al * er, br = ar * el
    der += t.al.transpose() * dbl;
    del += t.ar.transpose() * dbr;
    const Mat dal = dbl * t.er.transpose();
    const Mat dar = dbr * t.el.transpose();
    const Mat ds = row_softmax_backward(t.al, dal) + row_softmax_backward(t.ar, dar).transpose();
    const double c = cfg.align_temperature / sqrt_d;
    del += c * ds * t.er;
    der += c * ds.transpose() * t.el;
    auto scatter = [&](const std::vector<std::size_t>& pos, const std::vector<LnCache>& caches,
                       const Mat& de) {
      for (std::size_t k = 0; k < pos.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(pos[k]);
        Vec dzb = ln_backward(de.row(static_cast<Eigen::Index>(k)).transpose(), caches[k]);
        if (t.dropout) dzb = dzb.cwiseProduct(t.mask_align_in.row(row).transpose());
        dz.row(row) += dzb.transpose();
      }
    };
    scatter(t.left, t.ln_left, del);
    scatter(t.right, t.ln_right, der);
  }

  // Embeddings.
  const Mat dzp = t.dropout ? Mat(dx0.cwiseProduct(t.mask_in)) : dx0;
  dz += dzp;
  gr.pos_emb.topRows(rows) += dzp;
  Mat dmixed;
  if (cfg.n_prompt > 0) dmixed = Mat::Zero(static_cast<Eigen::Index>(cfg.n_prompt), d);
  bool any_prompt = false;
  for (std::size_t i = 0; i < t.len; ++i) {
    const int id = seq.tokens[i];
    const int slot = Vocabulary::prompt_slot(id);
    if (slot >= 0) {
      dmixed.row(slot) += dz.row(static_cast<Eigen::Index>(i));
      any_prompt = true;
    } else {
      gr.tok_emb.row(id) += dz.row(static_cast<Eigen::Index>(i));
    }
  }
  if (any_prompt) {
    gr.prompt_emb += dmixed;
    const Eigen::Index h = d / 2;
    lstm_backward(p.lstm_fw_wx, p.lstm_fw_wh, p.prompt_emb, t.fw, false, dmixed, 0, gr.lstm_fw_wx,
                  gr.lstm_fw_wh, gr.lstm_fw_b, gr.prompt_emb);
    lstm_backward(p.lstm_bw_wx, p.lstm_bw_wh, p.prompt_emb, t.bw, true, dmixed, h, gr.lstm_bw_wx,
                  gr.lstm_bw_wh, gr.lstm_bw_b, gr.prompt_emb);
  }
}

}  // namespace detail

GradCheckReport gradient_check(const Model& model, HeadMode head, const LabelWords& words,
                               std::span<const TokenSequence> batch,
                               std::span<const Target> targets, ForwardMode mode, double step) {
  if (batch.size() != targets.size()) throw_invalid("gradient_check: batch/target size mismatch");
  Parameters analytic = Parameters::zeros_like(model.params);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    loss_and_grad(batch[i], model, head, words, targets[i], mode, &analytic);
  }
  Model probe = model;
  auto total_loss = [&]() {
    double l = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      l += loss_and_grad(batch[i], probe, head, words, targets[i], mode, nullptr);
    }
    return l;
  };

  GradCheckReport report;
  double sq = 0.0;
  for (const auto& entry : kTensors) {
    Mat& w = probe.params.*entry.member;
    const Mat& a = analytic.*entry.member;
    sq += a.squaredNorm();
    Mat numeric = Mat::Zero(w.rows(), w.cols());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const double saved = w.data()[k];
      w.data()[k] = saved + step;
      const double up = total_loss();
      w.data()[k] = saved - step;
      const double down = total_loss();
      w.data()[k] = saved;
      numeric.data()[k] = (up - down) / (2.0 * step);
    }
    const double na = a.norm();
    const double nn = numeric.norm();
    const double rel = (na < 1e-12 && nn < 1e-12) ? 0.0 : (a - numeric).norm() / (na + nn);
    report.per_tensor.emplace_back(std::string(entry.name), rel);
    if (rel > report.max_rel_error || report.worst_tensor.empty()) {
      if (rel >= report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_tensor = std::string(entry.name);
      }
    }
  }
  report.grad_norm = std::sqrt(sq);
  return report;
}

}  // namespace gemkit
