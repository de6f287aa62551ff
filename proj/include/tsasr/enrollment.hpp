// tsasr/enrollment.hpp

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

#ifndef TSASR_ENROLLMENT_HPP
#define TSASR_ENROLLMENT_HPP

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tsasr/autograd.hpp"
#include "tsasr/diar_io.hpp"

namespace tsasr {

struct EnrollWindow {
  int64_t t_start = 0;
  int64_t t_end = 0;  // exclusive; t_end - t_start = min(W, T)
  double score = 0.0;  // sum of p_T over the window
};

/// Length-min(W,T) window maximizing the sum of target probabilities,
/// earliest window on ties. O(T) via a running window sum.
EnrollWindow SelectEnrollment(const std::vector<double> &p_target, int64_t window);

/// One contiguous single-speaker feature block used to assemble an
/// enrollment mixture.
struct EnrollStream {
  std::string speaker;
  Tensor features;  // L x F
};

/// Offsets every interferer so that the overlapped fraction of the target's
/// extent equals `overlap_ratio` (within one frame); all interferers share
/// one randomly chosen side of the target so the union of overlaps stays at
/// the requested ratio. Returns summed features and the true activity.
std::pair<Tensor, ActivityMatrix> BuildEnrollmentMixture(
    const EnrollStream &target, const std::vector<EnrollStream> &interferers,
    double overlap_ratio, std::mt19937_64 &rng, double frame_rate);

}  // namespace tsasr

#endif  // TSASR_ENROLLMENT_HPP
