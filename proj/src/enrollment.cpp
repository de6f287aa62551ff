// tsasr/enrollment.cpp

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

#include "tsasr/enrollment.hpp"

#include <algorithm>
#include <cmath>

namespace tsasr {

EnrollWindow SelectEnrollment(const std::vector<double> &p_target, int64_t window) {
  int64_t T = static_cast<int64_t>(p_target.size());
  if (T < 1) throw std::invalid_argument("SelectEnrollment: empty series");
  if (window < 1) throw std::invalid_argument("SelectEnrollment: window < 1");
  int64_t w = std::min(window, T);

  double sum = 0.0;
  for (int64_t t = 0; t < w; ++t) sum += p_target[static_cast<size_t>(t)];
  EnrollWindow best{0, w, sum};
  for (int64_t start = 1; start + w <= T; ++start) {
    sum += p_target[static_cast<size_t>(start + w - 1)] - p_target[static_cast<size_t>(start - 1)];
    if (sum > best.score) best = EnrollWindow{start, start + w, sum};
  }
  return best;
}

std::pair<Tensor, ActivityMatrix> BuildEnrollmentMixture(
    const EnrollStream &target, const std::vector<EnrollStream> &interferers,
    double overlap_ratio, std::mt19937_64 &rng, double frame_rate) {
  if (overlap_ratio < 0 || overlap_ratio > 1)
    throw std::invalid_argument("BuildEnrollmentMixture: overlap_ratio out of [0,1]");
  int64_t Lt = target.features.Rows();
  int64_t F = target.features.Cols();
  int64_t overlap_frames = static_cast<int64_t>(std::llround(overlap_ratio * Lt));

  // Interferers all sit on one side of the target so their overlap with the
  // target coincides in time and the union equals the requested ratio.
  std::uniform_int_distribution<int> side_dist(0, 1);
  bool after = side_dist(rng) == 1;

  std::vector<int64_t> offsets(interferers.size());
  int64_t min_off = 0;
  for (size_t i = 0; i < interferers.size(); ++i) {
    int64_t Li = interferers[i].features.Rows();
    int64_t ov = std::min(overlap_frames, std::min(Lt, Li));
    offsets[i] = after ? Lt - ov : ov - Li;
    min_off = std::min(min_off, offsets[i]);
  }
  int64_t target_off = -min_off;
  int64_t total = target_off + Lt;
  for (size_t i = 0; i < interferers.size(); ++i) {
    offsets[i] -= min_off;
    total = std::max(total, offsets[i] + interferers[i].features.Rows());
  }

  Tensor features({total, F});
  ActivityMatrix activity;
  activity.frame_rate = frame_rate;
  activity.num_frames = total;
  activity.speakers.push_back(target.speaker);
  for (const auto &s : interferers) activity.speakers.push_back(s.speaker);
  activity.values.assign(static_cast<size_t>(activity.NumSpeakers() * total), 0.0);

  auto place = [&](const Tensor &block, int64_t offset, int64_t row) {
    for (int64_t t = 0; t < block.Rows(); ++t) {
      for (int64_t f = 0; f < F; ++f) features.At(offset + t, f) += block.At(t, f);
      activity.At(row, offset + t) = 1.0;
    }
  };
  place(target.features, target_off, 0);
  for (size_t i = 0; i < interferers.size(); ++i)
    place(interferers[i].features, offsets[i], static_cast<int64_t>(i) + 1);

  return {std::move(features), std::move(activity)};
}

}  // namespace tsasr
