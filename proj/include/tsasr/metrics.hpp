// tsasr/metrics.hpp

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

#ifndef TSASR_METRICS_HPP
#define TSASR_METRICS_HPP

#include <string>
#include <vector>

#include "tsasr/diar_io.hpp"

namespace tsasr {

struct TimedWord {
  std::string text;
  double start = 0.0;
  double end = 0.0;
};

struct WerResult {
  int64_t errors = 0;
  int64_t ref_len = 0;
  double rate = 0.0;
  bool infinite = false;  // ref empty, hyp non-empty
};

/// Plain Levenshtein word error rate.
WerResult WordErrorRate(const std::vector<std::string> &ref, const std::vector<std::string> &hyp);

/// Per-speaker word streams, built from a segment list. Hypotheses without
/// per-word times get them interpolated linearly across the utterance span.
std::vector<std::pair<std::string, std::vector<TimedWord>>> SpeakerWordStreams(
    const std::vector<SegListEntry> &entries);

/// Time-constrained minimum-permutation WER: errors minimized over
/// injective-as-possible speaker assignments; a match or substitution is
/// permitted only when |ref_start - hyp_start| <= collar. Unassigned ref
/// streams count as deletions, unassigned hyp streams as insertions.
WerResult TcpWer(const std::vector<SegListEntry> &ref, const std::vector<SegListEntry> &hyp,
                 double collar = 5.0);

struct DerResult {
  double rate = 0.0;
  double missed = 0.0;     // seconds
  double false_alarm = 0.0;
  double confusion = 0.0;
  double ref_speech = 0.0;
};

/// Frame-based diarization error rate over binary activity, excluding frames
/// within `collar` of any reference segment boundary; speaker mapping chosen
/// exhaustively (<= 8 speakers) to minimize total error.
DerResult Der(const ActivityMatrix &ref, const ActivityMatrix &hyp, double collar = 0.25);

/// Mean absolute difference of per-recording speaker counts.
double Msce(const std::vector<int> &ref_counts, const std::vector<int> &hyp_counts);

}  // namespace tsasr

#endif  // TSASR_METRICS_HPP
