// tsasr/model.cpp

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

#include "tsasr/model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace tsasr {

Var FddtApply(const Var &z, const StnoMask &mask, const FddtParams &p) {
  if (z->value.Rows() != mask.num_frames)
    throw std::invalid_argument("FddtApply: mask frame count mismatch");
  Var out;
  for (int c = 0; c < 4; ++c) {
    Var term = ScaleRows(AddRowVec(MulRowVec(z, p.scale[c]), p.bias[c]), mask.Column(c));
    out = (c == 0) ? term : Add(out, term);
  }
  return out;
}

FddtParams InitFddt(bool pre_pe_site, int64_t d_model) {
  FddtParams p;
  for (int c = 0; c < 4; ++c) {
    double s = 1.0;
    if (pre_pe_site && (c == StnoMask::kSilence || c == StnoMask::kNonTarget)) s = 0.5;
    p.scale[c] = Param(Tensor({d_model}, s));
    p.bias[c] = Param(Tensor({d_model}, 0.0));
  }
  return p;
}

Var MultiHeadAttention(const Var &q_in, const Var &kv_in, const AttnParams &p, int heads) {
  int64_t d = p.wq->value.Cols();
  if (d % heads != 0) throw std::invalid_argument("MultiHeadAttention: heads must divide D");
  int64_t dh = d / heads;
  Var q = AddRowVec(MatMul(q_in, p.wq), p.bq);
  Var k = MatMul(kv_in, p.wk);
  Var v = AddRowVec(MatMul(kv_in, p.wv), p.bv);
  std::vector<Var> outs;
  outs.reserve(static_cast<size_t>(heads));
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int h = 0; h < heads; ++h) {
    Var qh = SliceCols(q, h * dh, dh);
    Var kh = SliceCols(k, h * dh, dh);
    Var vh = SliceCols(v, h * dh, dh);
    Var attn = SoftmaxRows(Scale(MatMulNT(qh, kh), inv_sqrt));
    outs.push_back(MatMul(attn, vh));
  }
  return AddRowVec(MatMul(ConcatCols(outs), p.wo), p.bo);
}

Var EncoderLayer(const Var &z, const StnoMask *mask, const LayerParams &lp, int heads) {
  if (z->value.Rows() < 1) throw std::invalid_argument("EncoderLayer: empty input");
  Var x = mask ? FddtApply(z, *mask, lp.fddt) : z;
  Var n1 = AddRowVec(MulRowVec(LayerNormRows(x), lp.ln1_g), lp.ln1_b);
  Var a = Add(x, MultiHeadAttention(n1, n1, lp.attn, heads));
  Var n2 = AddRowVec(MulRowVec(LayerNormRows(a), lp.ln2_g), lp.ln2_b);
  Var h = Gelu(AddRowVec(MatMul(n2, lp.ff_w1), lp.ff_b1));
  return Add(a, AddRowVec(MatMul(h, lp.ff_w2), lp.ff_b2));
}

Var EnrollFuse(const Var &z_main, const Var &z_se, const CrossAttnBlock &block, int heads) {
  if (z_main->value.Rows() < 1 || z_se->value.Rows() < 1)
    throw std::invalid_argument("EnrollFuse: empty input");
  Var context = MultiHeadAttention(z_main, z_se, block.attn, heads);
  Var h = Gelu(AddRowVec(MatMul(ConcatCols({z_main, context}), block.mlp_w1), block.mlp_b1));
  Var f = AddRowVec(MatMul(h, block.mlp_w2), block.mlp_b2);
  return Add(f, z_main);
}

Tensor SinusoidalPositionalEmbedding(int64_t frames, int64_t d_model) {
  Tensor pe({frames, d_model});
  for (int64_t t = 0; t < frames; ++t)
    for (int64_t i = 0; i < d_model; i += 2) {
      double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d_model));
      pe.At(t, i) = std::sin(static_cast<double>(t) * freq);
      if (i + 1 < d_model) pe.At(t, i + 1) = std::cos(static_cast<double>(t) * freq);
    }
  return pe;
}

namespace {

class Initializer {
 public:
  Initializer(std::map<std::string, Var> &params, uint64_t seed) : params_(params), rng_(seed) {}

  Var Weight(const std::string &name, int64_t fan_in, int64_t fan_out) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
    Tensor t({fan_in, fan_out});
    for (double &v : t.data) v = normal(rng_);
    return Register(name, std::move(t));
  }

  Var WeightRows(const std::string &name, int64_t rows, int64_t cols, int64_t fan_in) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
    Tensor t({rows, cols});
    for (double &v : t.data) v = normal(rng_);
    return Register(name, std::move(t));
  }

  Var Zeros(const std::string &name, std::vector<int64_t> shape) {
    return Register(name, Tensor(std::move(shape), 0.0));
  }

  Var Fill(const std::string &name, std::vector<int64_t> shape, double v) {
    return Register(name, Tensor(std::move(shape), v));
  }

  Var Register(const std::string &name, Tensor t) {
    Var p = Param(std::move(t));
    params_[name] = p;
    return p;
  }

 private:
  std::map<std::string, Var> &params_;
  std::mt19937_64 rng_;
};

const char *kClassNames[4] = {"s", "t", "n", "o"};

}  // namespace

Model::Model(EncoderConfig cfg, bool use_enrollment, uint64_t seed)
    : cfg_(cfg), use_enrollment_(use_enrollment) {
  if (cfg_.d_model % cfg_.heads != 0)
    throw std::invalid_argument("Model: d_model must be divisible by heads");
  if (cfg_.layers < 1 || cfg_.enroll_window < 1)
    throw std::invalid_argument("Model: layers and enroll_window must be >= 1");

  Initializer init(params_, seed);
  int64_t D = cfg_.d_model, F = cfg_.feat_dim, Dff = cfg_.d_ff, V = cfg_.vocab;

  conv1_w_ = init.WeightRows("conv1.w", 3 * F, D, 3 * F);
  conv1_b_ = init.Zeros("conv1.b", {D});
  conv2_w_ = init.WeightRows("conv2.w", 3 * D, D, 3 * D);
  conv2_b_ = init.Zeros("conv2.b", {D});

  prepe_ = InitFddt(true, D);
  for (int c = 0; c < 4; ++c) {
    params_["prepe_fddt.scale_" + std::string(kClassNames[c])] = prepe_.scale[c];
    params_["prepe_fddt.bias_" + std::string(kClassNames[c])] = prepe_.bias[c];
  }

  for (int l = 0; l < cfg_.layers; ++l) {
    std::string pfx = "layers." + std::to_string(l) + ".";
    LayerParams lp;
    lp.fddt = InitFddt(false, D);
    for (int c = 0; c < 4; ++c) {
      params_[pfx + "fddt.scale_" + kClassNames[c]] = lp.fddt.scale[c];
      params_[pfx + "fddt.bias_" + kClassNames[c]] = lp.fddt.bias[c];
    }
    lp.ln1_g = init.Fill(pfx + "ln1.g", {D}, 1.0);
    lp.ln1_b = init.Zeros(pfx + "ln1.b", {D});
    lp.attn.wq = init.Weight(pfx + "attn.wq", D, D);
    lp.attn.bq = init.Zeros(pfx + "attn.bq", {D});
    lp.attn.wk = init.Weight(pfx + "attn.wk", D, D);
    lp.attn.wv = init.Weight(pfx + "attn.wv", D, D);
    lp.attn.bv = init.Zeros(pfx + "attn.bv", {D});
    lp.attn.wo = init.Weight(pfx + "attn.wo", D, D);
    lp.attn.bo = init.Zeros(pfx + "attn.bo", {D});
    lp.ln2_g = init.Fill(pfx + "ln2.g", {D}, 1.0);
    lp.ln2_b = init.Zeros(pfx + "ln2.b", {D});
    lp.ff_w1 = init.Weight(pfx + "ffn.w1", D, Dff);
    lp.ff_b1 = init.Zeros(pfx + "ffn.b1", {Dff});
    lp.ff_w2 = init.Weight(pfx + "ffn.w2", Dff, D);
    lp.ff_b2 = init.Zeros(pfx + "ffn.b2", {D});
    layers_.push_back(std::move(lp));

    if (use_enrollment_) {
      std::string xp = "xattn." + std::to_string(l) + ".";
      CrossAttnBlock xb;
      xb.attn.wq = init.Weight(xp + "wq", D, D);
      xb.attn.bq = init.Zeros(xp + "bq", {D});
      xb.attn.wk = init.Weight(xp + "wk", D, D);
      xb.attn.wv = init.Weight(xp + "wv", D, D);
      xb.attn.bv = init.Zeros(xp + "bv", {D});
      // Zero-initialized output projections: the fusion path starts as the
      // identity, so pretrained-equivalent behavior is preserved at step 0.
      xb.attn.wo = init.Zeros(xp + "wo", {D, D});
      xb.attn.bo = init.Zeros(xp + "bo", {D});
      xb.mlp_w1 = init.Weight(xp + "mlp.w1", 2 * D, Dff);
      xb.mlp_b1 = init.Zeros(xp + "mlp.b1", {Dff});
      xb.mlp_w2 = init.Zeros(xp + "mlp.w2", {Dff, D});
      xb.mlp_b2 = init.Zeros(xp + "mlp.b2", {D});
      xattn_.push_back(std::move(xb));
    }
  }

  head_w_ = init.Weight("head.w", D, V);
  head_b_ = init.Zeros("head.b", {V});
}

Var Model::ConvSubsample(const Tensor &features) const {
  if (features.Rows() < cfg_.stride)
    throw std::invalid_argument("Model: input shorter than conv stride");
  Var x = Constant(features);
  Var c1 = Gelu(Conv1d(x, conv1_w_, conv1_b_, 3, 1, 1));
  return Gelu(Conv1d(c1, conv2_w_, conv2_b_, 3, cfg_.stride, 1));
}

Var Model::Forward(const Tensor &features, const StnoMask &stno,
                   const Tensor *enroll_features, const StnoMask *enroll_stno) const {
  Var z = ConvSubsample(features);
  int64_t T = z->value.Rows();
  if (stno.num_frames != T)
    throw std::invalid_argument("Model::Forward: STNO not aligned to post-subsampling frames");
  z = FddtApply(z, stno, prepe_);
  z = Add(z, Constant(SinusoidalPositionalEmbedding(T, cfg_.d_model)));

  bool with_enroll = use_enrollment_ && enroll_features && enroll_stno;
  Var z_se;
  if (with_enroll) {
    z_se = ConvSubsample(*enroll_features);
    if (enroll_stno->num_frames != z_se->value.Rows())
      throw std::invalid_argument("Model::Forward: enrollment STNO misaligned");
    z_se = FddtApply(z_se, *enroll_stno, prepe_);
    // Enrollment positions restart at zero: the enrollment stream is an
    // independent encoder pass.
    z_se = Add(z_se, Constant(SinusoidalPositionalEmbedding(z_se->value.Rows(), cfg_.d_model)));
  }

  for (int l = 0; l < cfg_.layers; ++l) {
    if (with_enroll) {
      z_se = EncoderLayer(z_se, enroll_stno, layers_[static_cast<size_t>(l)], cfg_.heads);
      z = EnrollFuse(z, z_se, xattn_[static_cast<size_t>(l)], cfg_.heads);
    }
    z = EncoderLayer(z, &stno, layers_[static_cast<size_t>(l)], cfg_.heads);
  }
  return AddRowVec(MatMul(z, head_w_), head_b_);
}

Var Model::ForwardPlain(const Tensor &features) const {
  Var z = ConvSubsample(features);
  z = Add(z, Constant(SinusoidalPositionalEmbedding(z->value.Rows(), cfg_.d_model)));
  for (int l = 0; l < cfg_.layers; ++l)
    z = EncoderLayer(z, nullptr, layers_[static_cast<size_t>(l)], cfg_.heads);
  return AddRowVec(MatMul(z, head_w_), head_b_);
}

Var Model::Loss(const Var &logits, const std::vector<int> &targets) const {
  return CrossEntropyMean(logits, targets, -1);
}

void Model::ZeroGrads() {
  for (auto &[name, p] : params_) p->ZeroGrad();
}

void Model::SaveCheckpoint(const std::string &path) const {
  nlohmann::json j;
  j["format"] = "tsasr-checkpoint";
  j["version"] = 1;
  j["use_enrollment"] = use_enrollment_;
  j["config"] = {{"layers", cfg_.layers},       {"d_model", cfg_.d_model},
                 {"heads", cfg_.heads},         {"d_ff", cfg_.d_ff},
                 {"vocab", cfg_.vocab},         {"stride", cfg_.stride},
                 {"max_frames", cfg_.max_frames}, {"enroll_window", cfg_.enroll_window},
                 {"feat_dim", cfg_.feat_dim}};
  nlohmann::json params = nlohmann::json::object();
  for (const auto &[name, p] : params_)
    params[name] = {{"shape", p->value.shape}, {"data", p->value.data}};
  j["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("SaveCheckpoint: cannot open " + path);
  out << j.dump();
}

Model Model::LoadCheckpoint(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("LoadCheckpoint: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.at("format") != "tsasr-checkpoint" || j.at("version") != 1)
    throw std::runtime_error("LoadCheckpoint: unsupported checkpoint format");
  EncoderConfig cfg;
  const auto &c = j.at("config");
  cfg.layers = c.at("layers");
  cfg.d_model = c.at("d_model");
  cfg.heads = c.at("heads");
  cfg.d_ff = c.at("d_ff");
  cfg.vocab = c.at("vocab");
  cfg.stride = c.at("stride");
  cfg.max_frames = c.at("max_frames");
  cfg.enroll_window = c.at("enroll_window");
  cfg.feat_dim = c.at("feat_dim");
  Model m(cfg, j.at("use_enrollment"), /*seed=*/0);
  for (auto &[name, p] : m.params_) {
    const auto &entry = j.at("params").at(name);
    std::vector<int64_t> shape = entry.at("shape").get<std::vector<int64_t>>();
    if (shape != p->value.shape)
      throw std::runtime_error("LoadCheckpoint: shape mismatch for " + name);
    p->value.data = entry.at("data").get<std::vector<double>>();
  }
  return m;
}

}  // namespace tsasr
