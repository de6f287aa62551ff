// tsasr/diar_io.hpp

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

#ifndef TSASR_DIAR_IO_HPP
#define TSASR_DIAR_IO_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace tsasr {

struct RttmRecord {
  std::string recording_id;
  double onset = 0.0;     // seconds, >= 0
  double duration = 0.0;  // seconds, > 0
  std::string speaker;
};

/// Per-speaker, per-frame speech probabilities d(s,t) in [0,1].
struct ActivityMatrix {
  std::vector<std::string> speakers;  // unique, first-appearance order
  double frame_rate = 0.0;            // frames per second
  int64_t num_frames = 0;
  std::vector<double> values;  // S x T row-major

  int64_t NumSpeakers() const { return static_cast<int64_t>(speakers.size()); }
  double &At(int64_t s, int64_t t) { return values[static_cast<size_t>(s * num_frames + t)]; }
  double At(int64_t s, int64_t t) const { return values[static_cast<size_t>(s * num_frames + t)]; }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string &msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int Line() const { return line_; }

 private:
  int line_;
};

/// Parses SPEAKER lines of an RTTM document; other line types are skipped.
std::vector<RttmRecord> ParseRttm(const std::string &text);

/// Emits SPEAKER lines, times with 3 decimals.
std::string SerializeRttm(const std::vector<RttmRecord> &records);

/// Binarized segment rendering: frame t is active for a speaker iff the
/// frame midpoint (t + 0.5)/frame_rate lies inside one of its segments.
ActivityMatrix SegmentsToActivity(const std::vector<RttmRecord> &records,
                                  double frame_rate, double total_duration);

/// Mean-pools each output frame over the source frames whose midpoints fall
/// in its time span; empty spans take the nearest source frame.
ActivityMatrix ResampleActivity(const ActivityMatrix &m, double target_rate);

// Segment-list JSON for metric scoring and transcripts.
struct SegListEntry {
  std::string speaker;
  double start_time = 0.0;
  double end_time = 0.0;
  std::vector<std::string> words;
};

std::vector<SegListEntry> ParseSegListJson(const std::string &json_text);
std::string SerializeSegListJson(const std::vector<SegListEntry> &entries);

}  // namespace tsasr

#endif  // TSASR_DIAR_IO_HPP
