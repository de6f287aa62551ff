// tsasr/stno.cpp

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

#include "tsasr/stno.hpp"

#include <algorithm>
#include <cmath>

namespace tsasr {

std::vector<double> StnoMask::Column(int c) const {
  std::vector<double> col(static_cast<size_t>(num_frames));
  for (int64_t t = 0; t < num_frames; ++t) col[static_cast<size_t>(t)] = At(t, c);
  return col;
}

StnoMask ComputeStno(const ActivityMatrix &m, int64_t target_index) {
  if (target_index < 0 || target_index >= m.NumSpeakers())
    throw std::invalid_argument("ComputeStno: target_index out of range");
  StnoMask mask;
  mask.frame_rate = m.frame_rate;
  mask.num_frames = m.num_frames;
  mask.values.assign(static_cast<size_t>(m.num_frames * 4), 0.0);
  for (int64_t t = 0; t < m.num_frames; ++t) {
    double dk = m.At(target_index, t);
    double prod_others = 1.0;
    for (int64_t s = 0; s < m.NumSpeakers(); ++s)
      if (s != target_index) prod_others *= 1.0 - m.At(s, t);
    mask.At(t, StnoMask::kSilence) = (1.0 - dk) * prod_others;
    mask.At(t, StnoMask::kTarget) = dk * prod_others;
    mask.At(t, StnoMask::kNonTarget) = (1.0 - dk) * (1.0 - prod_others);
    mask.At(t, StnoMask::kOverlap) = dk * (1.0 - prod_others);
  }
  return mask;
}

StnoMask StnoGaussianNoise(const StnoMask &mask, double sigma, double apply_prob,
                           std::mt19937_64 &rng) {
  if (sigma < 0) throw std::invalid_argument("StnoGaussianNoise: sigma < 0");
  if (apply_prob < 0 || apply_prob > 1)
    throw std::invalid_argument("StnoGaussianNoise: apply_prob out of [0,1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) >= apply_prob || sigma == 0.0) return mask;

  std::normal_distribution<double> noise(0.0, sigma);
  StnoMask out = mask;
  for (int64_t t = 0; t < out.num_frames; ++t) {
    double row[4];
    double sum = 0.0;
    for (int c = 0; c < 4; ++c) {
      row[c] = std::max(mask.At(t, c) + noise(rng), 0.0);
      sum += row[c];
    }
    if (sum <= 0.0) continue;  // degenerate row: keep original
    for (int c = 0; c < 4; ++c) out.At(t, c) = row[c] / sum;
  }
  return out;
}

StnoMask StnoSegmentFlip(const StnoMask &mask, double apply_prob, double seg_len_lo,
                         double seg_len_hi, double flip_prob, std::mt19937_64 &rng) {
  if (seg_len_lo <= 0 || seg_len_hi < seg_len_lo)
    throw std::invalid_argument("StnoSegmentFlip: bad segment length range");
  if (apply_prob < 0 || apply_prob > 1 || flip_prob < 0 || flip_prob > 1)
    throw std::invalid_argument("StnoSegmentFlip: probability out of [0,1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) >= apply_prob) return mask;

  StnoMask out = mask;
  std::uniform_real_distribution<double> seg_len(seg_len_lo, seg_len_hi);
  int64_t t = 0;
  while (t < out.num_frames) {
    int64_t len = std::max<int64_t>(
        1, static_cast<int64_t>(std::llround(seg_len(rng) * out.frame_rate)));
    int64_t end = std::min(t + len, out.num_frames);
    if (unif(rng) < flip_prob) {
      // dominant class = argmax of the segment-mean row
      double means[4] = {0, 0, 0, 0};
      for (int64_t u = t; u < end; ++u)
        for (int c = 0; c < 4; ++c) means[c] += out.At(u, c);
      int dominant = static_cast<int>(std::max_element(means, means + 4) - means);
      std::uniform_int_distribution<int> pick(0, 2);
      int other = pick(rng);
      if (other >= dominant) ++other;
      for (int64_t u = t; u < end; ++u)
        std::swap(out.At(u, dominant), out.At(u, other));
    }
    t = end;
  }
  return out;
}

void JointSpecAugment(Tensor &features, StnoMask &mask, int time_masks, int max_time,
                      int freq_masks, int max_freq, std::mt19937_64 &rng) {
  int64_t T = features.Rows(), F = features.Cols();
  if (T != mask.num_frames)
    throw std::invalid_argument("JointSpecAugment: feature/mask frame count mismatch");
  for (int i = 0; i < time_masks; ++i) {
    std::uniform_int_distribution<int64_t> len_dist(0, std::min<int64_t>(max_time, T));
    int64_t len = len_dist(rng);
    if (len == 0) continue;
    std::uniform_int_distribution<int64_t> start_dist(0, T - len);
    int64_t start = start_dist(rng);
    for (int64_t t = start; t < start + len; ++t) {
      for (int64_t f = 0; f < F; ++f) features.At(t, f) = 0.0;
      mask.At(t, StnoMask::kSilence) = 1.0;
      mask.At(t, StnoMask::kTarget) = 0.0;
      mask.At(t, StnoMask::kNonTarget) = 0.0;
      mask.At(t, StnoMask::kOverlap) = 0.0;
    }
  }
  for (int i = 0; i < freq_masks; ++i) {
    std::uniform_int_distribution<int64_t> len_dist(0, std::min<int64_t>(max_freq, F));
    int64_t len = len_dist(rng);
    if (len == 0) continue;
    std::uniform_int_distribution<int64_t> start_dist(0, F - len);
    int64_t start = start_dist(rng);
    for (int64_t t = 0; t < T; ++t)
      for (int64_t f = start; f < start + len; ++f) features.At(t, f) = 0.0;
  }
}

StnoMask PoolMask(const StnoMask &mask, int stride) {
  if (stride < 1) throw std::invalid_argument("PoolMask: stride < 1");
  StnoMask out;
  out.frame_rate = mask.frame_rate / static_cast<double>(stride);
  out.num_frames = (mask.num_frames + stride - 1) / stride;
  out.values.assign(static_cast<size_t>(out.num_frames * 4), 0.0);
  for (int64_t to = 0; to < out.num_frames; ++to) {
    int64_t lo = to * stride;
    int64_t hi = std::min<int64_t>(lo + stride, mask.num_frames);
    for (int c = 0; c < 4; ++c) {
      double acc = 0.0;
      for (int64_t t = lo; t < hi; ++t) acc += mask.At(t, c);
      out.At(to, c) = acc / static_cast<double>(hi - lo);
    }
  }
  return out;
}

}  // namespace tsasr
