// tsasr/synth.cpp

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

#include "tsasr/synth.hpp"

#include <algorithm>
#include <cmath>

namespace tsasr {

namespace {

void NormalizeRow(double *row, int64_t n) {
  double norm = 0.0;
  for (int64_t i = 0; i < n; ++i) norm += row[i] * row[i];
  norm = std::sqrt(norm);
  if (norm > 0)
    for (int64_t i = 0; i < n; ++i) row[i] /= norm;
}

bool SameIdentity(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9) return false;
  return true;
}

}  // namespace

Tensor MakeTokenEmbeddings(int vocab, int64_t feat_dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor emb({vocab, feat_dim});
  for (int v = 0; v < vocab; ++v) {
    for (int64_t f = 0; f < feat_dim; ++f) emb.At(v, f) = normal(rng);
    NormalizeRow(&emb.data[static_cast<size_t>(v) * feat_dim], feat_dim);
  }
  return emb;
}

Tensor MakeIdentityPool(int n, int64_t feat_dim, uint64_t seed) {
  if (n < 1 || feat_dim < 1) throw std::invalid_argument("MakeIdentityPool: bad dimensions");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor pool({n, feat_dim});
  for (int i = 0; i < n; ++i) {
    for (int64_t f = 0; f < feat_dim; ++f) pool.At(i, f) = normal(rng);
    NormalizeRow(&pool.data[static_cast<size_t>(i) * feat_dim], feat_dim);
  }
  return pool;
}

SpeakerProfile GenerateSpeaker(std::mt19937_64 &rng, int64_t feat_dim, int vocab,
                               int64_t length, int token_run, std::string speaker_id,
                               const Tensor *identity_pool) {
  if (feat_dim < 1 || vocab < 1 || length < 1 || token_run < 1)
    throw std::invalid_argument("GenerateSpeaker: bad dimensions");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> tok(0, vocab - 1);

  SpeakerProfile p;
  p.speaker_id = std::move(speaker_id);
  p.identity.resize(static_cast<size_t>(feat_dim));
  if (identity_pool != nullptr) {
    if (identity_pool->Cols() != feat_dim)
      throw std::invalid_argument("GenerateSpeaker: pool feature dim mismatch");
    std::uniform_int_distribution<int64_t> pick(0, identity_pool->Rows() - 1);
    int64_t i = pick(rng);
    for (int64_t f = 0; f < feat_dim; ++f) p.identity[static_cast<size_t>(f)] = identity_pool->At(i, f);
  } else {
    for (auto &v : p.identity) v = normal(rng);
    NormalizeRow(p.identity.data(), feat_dim);
  }

  p.tokens.resize(static_cast<size_t>(length));
  for (int64_t t = 0; t < length; t += token_run) {
    int tk = tok(rng);
    for (int64_t u = t; u < std::min<int64_t>(t + token_run, length); ++u)
      p.tokens[static_cast<size_t>(u)] = tk;
  }
  return p;
}

Tensor RenderFrames(const SpeakerProfile &profile, const Tensor &embeddings,
                    int64_t t0, int64_t t1, double obs_noise, std::mt19937_64 &rng) {
  if (t0 < 0 || t1 > static_cast<int64_t>(profile.tokens.size()) || t1 <= t0)
    throw std::invalid_argument("RenderFrames: range out of bounds");
  int64_t F = embeddings.Cols();
  std::normal_distribution<double> noise(0.0, obs_noise);
  Tensor out({t1 - t0, F});
  for (int64_t t = t0; t < t1; ++t) {
    int tok = profile.tokens[static_cast<size_t>(t)];
    for (int64_t f = 0; f < F; ++f) {
      double v = profile.identity[static_cast<size_t>(f)] * embeddings.At(tok, f);
      if (obs_noise > 0) v += noise(rng);
      out.At(t - t0, f) = v;
    }
  }
  return out;
}

MixtureSample GenerateMixture(int n_speakers, double overlap_lo, double overlap_hi,
                              std::mt19937_64 &rng, const SynthConfig &cfg,
                              const Tensor &embeddings) {
  if (n_speakers < 1) throw std::invalid_argument("GenerateMixture: n_speakers < 1");
  if (cfg.n_identities > 0 && cfg.n_identities < n_speakers)
    throw std::invalid_argument("GenerateMixture: identity pool smaller than n_speakers");
  int64_t L = cfg.utt_frames;
  std::uniform_real_distribution<double> rho_dist(overlap_lo, overlap_hi);
  Tensor pool;
  if (cfg.n_identities > 0)
    pool = MakeIdentityPool(cfg.n_identities, cfg.feat_dim, cfg.embedding_seed + 1);

  MixtureSample sample;
  for (int s = 0; s < n_speakers; ++s) {
    SpeakerProfile p;
    do {
      p = GenerateSpeaker(rng, cfg.feat_dim, cfg.vocab, 2 * L, cfg.token_run,
                          "spk" + std::to_string(s), cfg.n_identities > 0 ? &pool : nullptr);
    } while (std::any_of(sample.speakers.begin(), sample.speakers.end(),
                         [&](const SpeakerProfile &q) { return SameIdentity(p.identity, q.identity); }));
    sample.speakers.push_back(std::move(p));
    if (s == 0) {
      sample.offsets.push_back(0);
    } else {
      double rho = rho_dist(rng);
      sample.offsets.push_back(static_cast<int64_t>(std::llround((1.0 - rho) * L)));
    }
  }

  int64_t T0 = 0;
  for (int s = 0; s < n_speakers; ++s) T0 = std::max(T0, sample.offsets[s] + L);

  sample.features = Tensor({T0, cfg.feat_dim});
  sample.activity.frame_rate = cfg.frame_rate;
  sample.activity.num_frames = T0;
  for (const auto &p : sample.speakers) sample.activity.speakers.push_back(p.speaker_id);
  sample.activity.values.assign(static_cast<size_t>(n_speakers * T0), 0.0);
  sample.transcripts.assign(static_cast<size_t>(n_speakers),
                            std::vector<int>(static_cast<size_t>(T0), -1));

  for (int s = 0; s < n_speakers; ++s) {
    Tensor block = RenderFrames(sample.speakers[static_cast<size_t>(s)], embeddings, 0, L,
                                cfg.obs_noise, rng);
    int64_t off = sample.offsets[static_cast<size_t>(s)];
    for (int64_t t = 0; t < L; ++t) {
      for (int64_t f = 0; f < cfg.feat_dim; ++f)
        sample.features.At(off + t, f) += block.At(t, f);
      sample.activity.At(s, off + t) = 1.0;
      sample.transcripts[static_cast<size_t>(s)][static_cast<size_t>(off + t)] =
          sample.speakers[static_cast<size_t>(s)].tokens[static_cast<size_t>(t)];
    }
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (cfg.noise_prob > 0 && unif(rng) < cfg.noise_prob && cfg.noise_std > 0) {
    std::normal_distribution<double> bg(0.0, cfg.noise_std);
    for (double &v : sample.features.data) v += bg(rng);
  }
  return sample;
}

double MeasuredOverlapRatio(const ActivityMatrix &activity, int64_t a, int64_t b) {
  int64_t active = 0, both = 0;
  for (int64_t t = 0; t < activity.num_frames; ++t) {
    if (activity.At(a, t) >= 0.5) {
      ++active;
      if (activity.At(b, t) >= 0.5) ++both;
    }
  }
  if (active == 0) return 0.0;
  return static_cast<double>(both) / static_cast<double>(active);
}

}  // namespace tsasr
