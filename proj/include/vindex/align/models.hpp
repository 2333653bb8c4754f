// Copyright 2026 The Vindex Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brain encoder and conditional denoiser with hand-derived backward passes.
// Batched activations stack samples along rows; token-level matrices hold
// B * tokens rows with sample b occupying rows [b*tokens, (b+1)*tokens).

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "vindex/align/diffusion.hpp"
#include "vindex/align/nn.hpp"

namespace vindex::align {

struct BrainEncoderConfig {
  std::map<std::string, Eigen::Index> subjects;  // subject id -> input length
  Eigen::Index hidden = 64;
  Eigen::Index grid_height = 4;
  Eigen::Index grid_width = 4;
  Eigen::Index dim = 8;
  bool bias = true;

  Eigen::Index tokens() const { return grid_height * grid_width; }
};

/// Per-subject linear adapter into a shared two-layer SiLU trunk and a linear head
/// producing tokens x dim.
template <typename Scalar>
class BrainEncoder {
 public:
  using scalar_type = Scalar;

  BrainEncoder() = default;

  static BrainEncoder init(const BrainEncoderConfig& config, RandomStream rng) {
    if (config.subjects.empty()) throw ValidationError("brain encoder: no subjects registered");
    if (config.hidden <= 0 || config.tokens() <= 0 || config.dim <= 0)
      throw ValidationError("brain encoder: dimensions must be positive");
    BrainEncoder e;
    e.config_ = config;
    for (const auto& [id, length] : config.subjects) {
      if (length <= 0) throw ValidationError("brain encoder: subject '" + id + "' has empty input");
      auto sub = rng.split("adapter/" + id);
      e.adapters_.emplace(id, Linear<Scalar>::uniform(length, config.hidden, sub));
    }
    auto r1 = rng.split("trunk1"), r2 = rng.split("trunk2"), r3 = rng.split("head");
    e.trunk1_ = Linear<Scalar>::uniform(config.hidden, config.hidden, r1);
    e.trunk2_ = Linear<Scalar>::uniform(config.hidden, config.hidden, r2);
    e.head_ = Linear<Scalar>::uniform(config.hidden, config.tokens() * config.dim, r3);
    if (!config.bias) e.zero_biases();
    return e;
  }

  const BrainEncoderConfig& config() const noexcept { return config_; }
  Linear<Scalar>& adapter(const std::string& subject) { return adapter_ref(subject); }
  Linear<Scalar>& trunk1() noexcept { return trunk1_; }
  Linear<Scalar>& trunk2() noexcept { return trunk2_; }
  Linear<Scalar>& head() noexcept { return head_; }

  struct Cache {
    std::vector<const BrainSignal<Scalar>*> signals;
    Mat<Scalar> z, a1, h1, a2, h2;
  };

  /// B x (tokens * dim); row b reshapes row-major into the sample's token grid.
  Mat<Scalar> forward(std::span<const BrainSignal<Scalar>> batch, Cache& cache) const {
    const Eigen::Index B = Eigen::Index(batch.size());
    cache.signals.clear();
    cache.z.resize(B, config_.hidden);
    for (Eigen::Index i = 0; i < B; ++i) {
      const auto& s = batch[std::size_t(i)];
      const auto& a = adapter_ref(s.subject_id);
      if (s.values.size() != a.in()) throw ShapeError("brain encoder: input length does not match subject adapter");
      cache.z.row(i) = (a.weight * s.values + a.bias).transpose();
      cache.signals.push_back(&s);
    }
    cache.a1 = trunk1_.forward(cache.z);
    cache.h1 = silu(cache.a1);
    cache.a2 = trunk2_.forward(cache.h1);
    cache.h2 = silu(cache.a2);
    return head_.forward(cache.h2);
  }

  FeatureGrid<Scalar> forward(const BrainSignal<Scalar>& s) const {
    Cache cache;
    const Mat<Scalar> y = forward(std::span<const BrainSignal<Scalar>>(&s, 1), cache);
    return FeatureGrid<Scalar>(config_.grid_height, config_.grid_width,
                               Eigen::Map<const Mat<Scalar>>(y.data(), config_.tokens(), config_.dim));
  }

  /// Accumulates parameter gradients for dL/dY into grad.
  void backward(const Cache& cache, const Mat<Scalar>& dy, BrainEncoder& grad) const {
    Mat<Scalar> d = head_.backward(cache.h2, dy, grad.head_);
    d = d.cwiseProduct(silu_grad(cache.a2).eval());
    d = trunk2_.backward(cache.h1, d, grad.trunk2_);
    d = d.cwiseProduct(silu_grad(cache.a1).eval());
    d = trunk1_.backward(cache.z, d, grad.trunk1_);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const auto* s = cache.signals[std::size_t(i)];
      auto& g = grad.adapter_ref(s->subject_id);
      g.weight.noalias() += d.row(i).transpose() * s->values.transpose();
      g.bias += d.row(i).transpose();
    }
  }

  BrainEncoder zeros_like() const {
    BrainEncoder g;
    g.config_ = config_;
    for (const auto& [id, a] : adapters_) g.adapters_.emplace(id, a.zeros_like());
    g.trunk1_ = trunk1_.zeros_like();
    g.trunk2_ = trunk2_.zeros_like();
    g.head_ = head_.zeros_like();
    return g;
  }

  template <typename F>
  void visit(F&& f, const std::string& prefix = "encoder") {
    auto layer = [&](Linear<Scalar>& l, const std::string& name) {
      f(ParamView<Scalar>{prefix + "." + name + ".weight", l.weight.data(), l.weight.size()});
      if (config_.bias) f(ParamView<Scalar>{prefix + "." + name + ".bias", l.bias.data(), l.bias.size()});
    };
    for (auto& [id, a] : adapters_) layer(a, "adapter[" + id + "]");
    layer(trunk1_, "trunk1");
    layer(trunk2_, "trunk2");
    layer(head_, "head");
  }

 private:
  const Linear<Scalar>& adapter_ref(const std::string& subject) const {
    auto it = adapters_.find(subject);
    if (it == adapters_.end()) throw UnknownSubject("brain encoder: unknown subject '" + subject + "'");
    return it->second;
  }
  Linear<Scalar>& adapter_ref(const std::string& subject) {
    return const_cast<Linear<Scalar>&>(std::as_const(*this).adapter_ref(subject));
  }

  void zero_biases() {
    for (auto& [id, a] : adapters_) a.bias.setZero();
    trunk1_.bias.setZero();
    trunk2_.bias.setZero();
    head_.bias.setZero();
  }

  BrainEncoderConfig config_;
  std::map<std::string, Linear<Scalar>> adapters_;
  Linear<Scalar> trunk1_, trunk2_, head_;
};

struct DenoiserConfig {
  Eigen::Index tokens = 16;
  Eigen::Index dim = 8;
  Eigen::Index depth = 1;
  Eigen::Index width = 1024;
  Eigen::Index time_dim = 64;  // sinusoidal features fed to the time projection
  bool identity_blocks = true;  // zero the last linear layer of each block
};

/// Residual-MLP noise predictor.
///
/// Input: masked rows get v_t + mask_token + pos_i; the rest pass v_t unchanged.
/// Condition per token: c = time(phi(t)) + cond(b_i). Each block computes
///   [scale, shift] = mod(silu(c)),  u = LN(h) * (1 + scale) + shift,
///   h <- h + fc2(silu(fc1(u))).
template <typename Scalar>
class Denoiser {
 public:
  using scalar_type = Scalar;

  struct Block {
    LayerNorm<Scalar> ln;
    Linear<Scalar> mod, fc1, fc2;
  };

  Denoiser() = default;

  static Denoiser init(const DenoiserConfig& config, RandomStream rng) {
    if (config.tokens <= 0 || config.dim <= 0 || config.depth < 0 || config.width <= 0 || config.time_dim <= 0)
      throw ValidationError("denoiser: dimensions must be positive");
    Denoiser d;
    d.config_ = config;
    const auto w = config.width;
    auto r_in = rng.split("in"), r_time = rng.split("time"), r_cond = rng.split("cond"), r_out = rng.split("out");
    d.in_ = Linear<Scalar>::uniform(config.dim, w, r_in);
    d.time_ = Linear<Scalar>::uniform(config.time_dim, w, r_time);
    d.cond_ = Linear<Scalar>::uniform(config.dim, w, r_cond);
    d.out_ = Linear<Scalar>::uniform(w, config.dim, r_out);
    auto r_mask = rng.split("mask_token");
    d.mask_token_.resize(config.dim);
    for (Eigen::Index j = 0; j < config.dim; ++j) d.mask_token_[j] = Scalar(0.02 * r_mask.normal());
    for (Eigen::Index k = 0; k < config.depth; ++k) {
      auto rb = rng.split("block", std::uint64_t(k));
      auto r_mod = rb.split("mod"), r1 = rb.split("fc1"), r2 = rb.split("fc2");
      Block b{LayerNorm<Scalar>(w), Linear<Scalar>::uniform(w, 2 * w, r_mod), Linear<Scalar>::uniform(w, w, r1),
              Linear<Scalar>::uniform(w, w, r2)};
      if (config.identity_blocks) {
        b.fc2.weight.setZero();
        b.fc2.bias.setZero();
      }
      d.blocks_.push_back(std::move(b));
    }
    d.pos_ = positional_table<Scalar>(config.tokens, config.dim);
    return d;
  }

  const DenoiserConfig& config() const noexcept { return config_; }
  std::vector<Block>& blocks() noexcept { return blocks_; }
  Linear<Scalar>& input() noexcept { return in_; }
  Linear<Scalar>& time_projection() noexcept { return time_; }
  Linear<Scalar>& condition_projection() noexcept { return cond_; }
  Linear<Scalar>& output() noexcept { return out_; }
  Vec<Scalar>& mask_token() noexcept { return mask_token_; }
  const Mat<Scalar>& positions() const noexcept { return pos_; }

  struct BlockCache {
    typename LayerNorm<Scalar>::Cache ln;
    Mat<Scalar> h_in, u, m, u2, a1, s1;
  };
  struct Cache {
    Mat<Scalar> x_in, h0, phi, b, c, sc, h_last;
    std::vector<BlockCache> blocks;
    std::vector<bool> mask;
    Eigen::Index batch = 0;
  };

  /// The denoiser input after masking, one row per token.
  Mat<Scalar> masked_input(const Mat<Scalar>& v_t, const std::vector<bool>& mask) const {
    Mat<Scalar> x = v_t;
    const Eigen::Index N = config_.tokens;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (mask[std::size_t(i)]) x.row(i) += mask_token_.transpose() + pos_.row(i % N);
    return x;
  }

  /// v_t, b: (B*tokens) x dim; t: B timesteps; mask: B*tokens flags.
  Mat<Scalar> forward(const Mat<Scalar>& v_t, const Mat<Scalar>& b, std::span<const int> t,
                      const std::vector<bool>& mask, Cache& cache) const {
    const Eigen::Index N = config_.tokens, D = config_.dim, w = config_.width;
    const Eigen::Index B = Eigen::Index(t.size());
    if (v_t.rows() != B * N || v_t.cols() != D || b.rows() != v_t.rows() || b.cols() != D ||
        Eigen::Index(mask.size()) != v_t.rows())
      throw ShapeError("denoiser: inconsistent input shapes");
    cache.batch = B;
    cache.mask = mask;
    cache.x_in = masked_input(v_t, mask);
    cache.h0 = in_.forward(cache.x_in);

    cache.phi.resize(B, config_.time_dim);
    for (Eigen::Index s = 0; s < B; ++s)
      cache.phi.row(s) = sinusoidal_embedding(Scalar(t[std::size_t(s)]), config_.time_dim).transpose();
    const Mat<Scalar> temb = time_.forward(cache.phi);
    cache.b = b;
    cache.c = cond_.forward(b);
    for (Eigen::Index i = 0; i < cache.c.rows(); ++i) cache.c.row(i) += temb.row(i / N);
    cache.sc = silu(cache.c);

    cache.blocks.resize(blocks_.size());
    Mat<Scalar> h = cache.h0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = blocks_[k];
      auto& bc = cache.blocks[k];
      bc.h_in = h;
      bc.u = blk.ln.forward(h, bc.ln);
      bc.m = blk.mod.forward(cache.sc);
      bc.u2 = bc.u.cwiseProduct((bc.m.leftCols(w).array() + Scalar(1)).matrix()) + bc.m.rightCols(w);
      bc.a1 = blk.fc1.forward(bc.u2);
      bc.s1 = silu(bc.a1);
      h += blk.fc2.forward(bc.s1);
    }
    cache.h_last = h;
    return out_.forward(h);
  }

  FeatureGrid<Scalar> forward(const FeatureGrid<Scalar>& v_t, const FeatureGrid<Scalar>& b, int t,
                              const TokenMask& mask) const {
    if (!v_t.same_shape(b)) throw ShapeError("denoiser: v_t and b shapes differ");
    if (mask.size() != std::size_t(v_t.token_count())) throw ShapeError("denoiser: mask length differs");
    Cache cache;
    const int ts[1] = {t};
    return FeatureGrid<Scalar>(v_t.height(), v_t.width(),
                               forward(v_t.tokens(), b.tokens(), std::span<const int>(ts), mask.flags, cache));
  }

  /// Accumulates parameter gradients; returns dL/db.
  Mat<Scalar> backward(const Cache& cache, const Mat<Scalar>& d_out, Denoiser& grad) const {
    const Eigen::Index N = config_.tokens, w = config_.width;
    Mat<Scalar> dh = out_.backward(cache.h_last, d_out, grad.out_);
    Mat<Scalar> dsc = Mat<Scalar>::Zero(cache.sc.rows(), cache.sc.cols());
    for (std::size_t k = blocks_.size(); k-- > 0;) {
      const auto& blk = blocks_[k];
      auto& gb = grad.blocks_[k];
      const auto& bc = cache.blocks[k];
      Mat<Scalar> d = blk.fc2.backward(bc.s1, dh, gb.fc2);
      d = d.cwiseProduct(silu_grad(bc.a1).eval());
      const Mat<Scalar> du2 = blk.fc1.backward(bc.u2, d, gb.fc1);
      Mat<Scalar> dm(du2.rows(), 2 * w);
      dm.leftCols(w) = du2.cwiseProduct(bc.u);
      dm.rightCols(w) = du2;
      dsc += blk.mod.backward(cache.sc, dm, gb.mod);
      const Mat<Scalar> du = du2.cwiseProduct((bc.m.leftCols(w).array() + Scalar(1)).matrix());
      dh += blk.ln.backward(bc.ln, du, gb.ln);
    }
    const Mat<Scalar> dx = in_.backward(cache.x_in, dh, grad.in_);
    for (Eigen::Index i = 0; i < dx.rows(); ++i)
      if (cache.mask[std::size_t(i)]) grad.mask_token_ += dx.row(i).transpose();

    const Mat<Scalar> dc = dsc.cwiseProduct(silu_grad(cache.c).eval());
    Mat<Scalar> dtemb = Mat<Scalar>::Zero(cache.batch, w);
    for (Eigen::Index i = 0; i < dc.rows(); ++i) dtemb.row(i / N) += dc.row(i);
    time_.accumulate(cache.phi, dtemb, grad.time_);
    return cond_.backward(cache.b, dc, grad.cond_);
  }

  Denoiser zeros_like() const {
    Denoiser g;
    g.config_ = config_;
    g.in_ = in_.zeros_like();
    g.time_ = time_.zeros_like();
    g.cond_ = cond_.zeros_like();
    g.out_ = out_.zeros_like();
    g.mask_token_ = Vec<Scalar>::Zero(mask_token_.size());
    for (const auto& b : blocks_) g.blocks_.push_back({b.ln.zeros_like(), b.mod.zeros_like(), b.fc1.zeros_like(), b.fc2.zeros_like()});
    g.pos_ = pos_;
    return g;
  }

  template <typename F>
  void visit(F&& f, const std::string& prefix = "denoiser") {
    in_.visit(prefix + ".input", f);
    time_.visit(prefix + ".time", f);
    cond_.visit(prefix + ".condition", f);
    f(ParamView<Scalar>{prefix + ".mask_token", mask_token_.data(), mask_token_.size()});
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const std::string p = prefix + ".block[" + std::to_string(k) + "]";
      blocks_[k].ln.visit(p + ".ln", f);
      blocks_[k].mod.visit(p + ".modulation", f);
      blocks_[k].fc1.visit(p + ".fc1", f);
      blocks_[k].fc2.visit(p + ".fc2", f);
    }
    out_.visit(prefix + ".output", f);
  }

 private:
  DenoiserConfig config_;
  Linear<Scalar> in_, time_, cond_, out_;
  Vec<Scalar> mask_token_;
  std::vector<Block> blocks_;
  Mat<Scalar> pos_;
};

}  // namespace vindex::align
