// tsasr/model.hpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef TSASR_MODEL_HPP
#define TSASR_MODEL_HPP

#include <map>
#include <string>
#include <vector>

#include "tsasr/autograd.hpp"
#include "tsasr/stno.hpp"

namespace tsasr {

struct EncoderConfig {
  int layers = 2;
  int d_model = 32;
  int heads = 4;
  int d_ff = 64;
  int vocab = 16;
  int stride = 2;
  int64_t max_frames = 4096;
  int64_t enroll_window = 50;  // W, in post-subsampling frames
  int64_t feat_dim = 24;
};

/// Four diagonal affine transforms, one per STNO class, blended per frame
/// by the mask probabilities.
struct FddtParams {
  Var scale[4];  // [D] each, class order (S, T, N, O)
  Var bias[4];
};

/// hat z_t = sum_i (scale_i ⊙ z_t + bias_i) * p_i^t
Var FddtApply(const Var &z, const StnoMask &mask, const FddtParams &p);

/// Pre-positional-embedding site starts with suppressive 0.5 scaling on the
/// silence and non-target classes; per-layer sites start as the identity.
FddtParams InitFddt(bool pre_pe_site, int64_t d_model);

// No key bias: under the row softmax it only shifts every score of a query
// by the same constant, so it could never train.
struct AttnParams {
  Var wq, bq, wk, wv, bv, wo, bo;
};

/// Multi-head attention; self-attention when q_in == kv_in, cross-attention
/// otherwise (queries from the main stream, keys/values from enrollment).
Var MultiHeadAttention(const Var &q_in, const Var &kv_in, const AttnParams &p, int heads);

struct LayerParams {
  FddtParams fddt;
  Var ln1_g, ln1_b;
  AttnParams attn;
  Var ln2_g, ln2_b;
  Var ff_w1, ff_b1, ff_w2, ff_b2;
};

/// FDDT modulation followed by pre-norm self-attention and feedforward with
/// residuals. mask == nullptr skips the FDDT site (plain encoder path).
Var EncoderLayer(const Var &z, const StnoMask *mask, const LayerParams &lp, int heads);

struct CrossAttnBlock {
  AttnParams attn;
  Var mlp_w1, mlp_b1, mlp_w2, mlp_b2;  // 2D -> d_ff -> D
};

/// C = Attention(Q from main, K/V from enrollment);
/// out = MLP([main; C]) + main. Zero-initialized output projections make
/// this the identity at step 0.
Var EnrollFuse(const Var &z_main, const Var &z_se, const CrossAttnBlock &block, int heads);

Tensor SinusoidalPositionalEmbedding(int64_t frames, int64_t d_model);

/// The conditioned encoder: convolutional subsampling, pre-PE FDDT,
/// per-layer FDDT, optional enrollment cross-attention fusion, and a
/// frame-level classification head.
class Model {
 public:
  Model(EncoderConfig cfg, bool use_enrollment, uint64_t seed);

  /// Main-stream frame logits, [T, V]. STNO masks must already be pooled to
  /// the post-subsampling frame grid. Enrollment inputs may be null (or the
  /// model built without enrollment), giving the mask-only forward.
  Var Forward(const Tensor &features, const StnoMask &stno,
              const Tensor *enroll_features, const StnoMask *enroll_stno) const;

  /// Plain transformer encoder on the same weights: no FDDT, no fusion.
  Var ForwardPlain(const Tensor &features) const;

  /// Mean cross-entropy over frames whose target != -1.
  Var Loss(const Var &logits, const std::vector<int> &targets) const;

  const EncoderConfig &Config() const { return cfg_; }
  bool UsesEnrollment() const { return use_enrollment_; }

  std::map<std::string, Var> &Params() { return params_; }
  const std::map<std::string, Var> &Params() const { return params_; }
  void ZeroGrads();

  void SaveCheckpoint(const std::string &path) const;
  static Model LoadCheckpoint(const std::string &path);

 private:
  Var ConvSubsample(const Tensor &features) const;

  EncoderConfig cfg_;
  bool use_enrollment_ = false;
  std::map<std::string, Var> params_;

  Var conv1_w_, conv1_b_, conv2_w_, conv2_b_;
  FddtParams prepe_;
  std::vector<LayerParams> layers_;
  std::vector<CrossAttnBlock> xattn_;
  Var head_w_, head_b_;
};

}  // namespace tsasr

#endif  // TSASR_MODEL_HPP
