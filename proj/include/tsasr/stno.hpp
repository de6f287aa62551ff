// tsasr/stno.hpp

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

#ifndef TSASR_STNO_HPP
#define TSASR_STNO_HPP

#include <random>

#include "tsasr/autograd.hpp"
#include "tsasr/diar_io.hpp"

namespace tsasr {

/// Per-frame (p_S, p_T, p_N, p_O) rows; each row is a point on the
/// 4-simplex (entries >= 0, sum 1).
struct StnoMask {
  double frame_rate = 0.0;
  int64_t num_frames = 0;
  std::vector<double> values;  // T x 4 row-major

  static constexpr int kSilence = 0;
  static constexpr int kTarget = 1;
  static constexpr int kNonTarget = 2;
  static constexpr int kOverlap = 3;

  double &At(int64_t t, int c) { return values[static_cast<size_t>(t * 4 + c)]; }
  double At(int64_t t, int c) const { return values[static_cast<size_t>(t * 4 + c)]; }

  /// Column c as a plain series (used for enrollment window scoring and
  /// the FDDT blend weights).
  std::vector<double> Column(int c) const;
};

/// Silence / target / non-target / overlap probabilities for one chosen
/// target speaker, from per-speaker activity. The product-form expressions
/// keep every entry non-negative and rows summing to 1.
StnoMask ComputeStno(const ActivityMatrix &m, int64_t target_index);

/// Per-entry additive Gaussian noise, clip at zero, renormalize each row by
/// its clipped sum; one Bernoulli draw per mask decides application. Rows
/// whose clipped sum is zero are left unchanged.
StnoMask StnoGaussianNoise(const StnoMask &mask, double sigma, double apply_prob,
                           std::mt19937_64 &rng);

/// Segment-wise dominant-class flips: consecutive segments with lengths
/// drawn uniformly from [seg_len_lo, seg_len_hi] seconds; per segment, with
/// probability flip_prob, the dominant class's mass is swapped per-frame
/// with one uniformly chosen other class.
StnoMask StnoSegmentFlip(const StnoMask &mask, double apply_prob, double seg_len_lo,
                         double seg_len_hi, double flip_prob, std::mt19937_64 &rng);

/// SpecAugment applied jointly: each time mask zeroes a span of feature rows
/// and sets the same mask rows to pure silence; frequency masks zero feature
/// columns only.
void JointSpecAugment(Tensor &features, StnoMask &mask, int time_masks, int max_time,
                      int freq_masks, int max_freq, std::mt19937_64 &rng);

/// Mean-pools mask rows in groups of `stride` raw frames, aligning a
/// raw-rate mask with the post-subsampling frame grid (output length
/// ceil(T/stride)). Mean pooling keeps rows on the simplex.
StnoMask PoolMask(const StnoMask &mask, int stride);

}  // namespace tsasr

#endif  // TSASR_STNO_HPP
