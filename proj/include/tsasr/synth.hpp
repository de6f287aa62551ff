// tsasr/synth.hpp

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

#ifndef TSASR_SYNTH_HPP
#define TSASR_SYNTH_HPP

#include <random>
#include <string>
#include <vector>

#include "tsasr/autograd.hpp"
#include "tsasr/diar_io.hpp"

namespace tsasr {

struct SynthConfig {
  int64_t feat_dim = 24;
  int vocab = 16;
  int token_run = 5;      // frames per locally-constant token run
  double obs_noise = 0.05;
  int64_t utt_frames = 100;
  double frame_rate = 100.0;
  double noise_prob = 0.3;  // additive background noise probability
  double noise_std = 0.05;
  uint64_t embedding_seed = 7771;
  // Speakers draw their identity from a fixed pool of this many unit-norm
  // Gaussian vectors (seeded off embedding_seed). 0 = a fresh identity per
  // speaker; that variant leaves token decoding solvable only through
  // in-context identity inference, which desk-scale training never cracks.
  int n_identities = 12;
};

struct SpeakerProfile {
  std::string speaker_id;
  std::vector<double> identity;  // unit-norm, length F
  std::vector<int> tokens;       // class indices in [0, V)
};

/// Fixed token-embedding table shared across speakers, [V, F] unit-norm rows.
Tensor MakeTokenEmbeddings(int vocab, int64_t feat_dim, uint64_t seed);

/// Fixed pool of reusable identities, [n, F] unit-norm N(0, I) rows.
Tensor MakeIdentityPool(int n, int64_t feat_dim, uint64_t seed);

/// With a pool, the identity is a uniformly drawn pool row; without one it
/// is a fresh unit-norm Gaussian vector.
SpeakerProfile GenerateSpeaker(std::mt19937_64 &rng, int64_t feat_dim, int vocab,
                               int64_t length, int token_run, std::string speaker_id,
                               const Tensor *identity_pool = nullptr);

/// Frames [t0, t1): identity ⊙ token_embedding(token_t) + observation noise.
/// Tokens only decode back to classes given the identity vector, which is
/// what makes fully overlapped mixtures ambiguous without enrollment.
Tensor RenderFrames(const SpeakerProfile &profile, const Tensor &embeddings,
                    int64_t t0, int64_t t1, double obs_noise, std::mt19937_64 &rng);

struct MixtureSample {
  Tensor features;                          // T0 x F
  ActivityMatrix activity;                  // binary
  std::vector<std::vector<int>> transcripts;  // per speaker, -1 where inactive
  std::vector<SpeakerProfile> speakers;     // retained for enrollment rendering
  std::vector<int64_t> offsets;             // placement of each speaker
};

/// Speaker 0 anchors the mixture; each additional speaker is delayed so its
/// overlap ratio against speaker 0 is drawn from [overlap_lo, overlap_hi].
/// Speaker profiles carry 2x utt_frames of tokens: the first half is
/// rendered here, the second half is reserved for enrollment mixtures.
MixtureSample GenerateMixture(int n_speakers, double overlap_lo, double overlap_hi,
                              std::mt19937_64 &rng, const SynthConfig &cfg,
                              const Tensor &embeddings);

/// Fraction of speaker a's active frames during which speaker b is active.
double MeasuredOverlapRatio(const ActivityMatrix &activity, int64_t a, int64_t b);

}  // namespace tsasr

#endif  // TSASR_SYNTH_HPP
