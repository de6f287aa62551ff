// tsasr/metrics.cpp

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

#include "tsasr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tsasr {

namespace {
constexpr int kMaxSpeakers = 8;
}

WerResult WordErrorRate(const std::vector<std::string> &ref, const std::vector<std::string> &hyp) {
  size_t n = ref.size(), m = hyp.size();
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  WerResult r;
  r.errors = prev[m];
  r.ref_len = static_cast<int64_t>(n);
  if (n == 0) {
    r.infinite = m > 0;
    r.rate = r.infinite ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    r.rate = static_cast<double>(r.errors) / static_cast<double>(n);
  }
  return r;
}

std::vector<std::pair<std::string, std::vector<TimedWord>>> SpeakerWordStreams(
    const std::vector<SegListEntry> &entries) {
  std::vector<std::pair<std::string, std::vector<TimedWord>>> streams;
  auto find = [&](const std::string &spk) -> std::vector<TimedWord> & {
    for (auto &[name, words] : streams)
      if (name == spk) return words;
    streams.emplace_back(spk, std::vector<TimedWord>{});
    return streams.back().second;
  };
  for (const auto &e : entries) {
    auto &words = find(e.speaker);
    size_t n = e.words.size();
    double span = e.end_time - e.start_time;
    for (size_t i = 0; i < n; ++i) {
      TimedWord w;
      w.text = e.words[i];
      w.start = e.start_time + span * static_cast<double>(i) / static_cast<double>(n);
      w.end = e.start_time + span * static_cast<double>(i + 1) / static_cast<double>(n);
      words.push_back(std::move(w));
    }
  }
  for (auto &[name, words] : streams)
    std::stable_sort(words.begin(), words.end(),
                     [](const TimedWord &a, const TimedWord &b) { return a.start < b.start; });
  return streams;
}

namespace {

/// Edit distance where the diagonal move is permitted only within the
/// start-time collar.
int64_t TimeConstrainedEditDistance(const std::vector<TimedWord> &ref,
                                    const std::vector<TimedWord> &hyp, double collar) {
  size_t n = ref.size(), m = hyp.size();
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      int64_t best = std::min(prev[j] + 1, cur[j - 1] + 1);
      if (std::abs(ref[i - 1].start - hyp[j - 1].start) <= collar) {
        int64_t sub = prev[j - 1] + (ref[i - 1].text == hyp[j - 1].text ? 0 : 1);
        best = std::min(best, sub);
      }
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// Min total cost over injective partial matchings; unmatched rows/cols pay
/// their stated penalty.
int64_t MinAssignmentCost(const std::vector<std::vector<int64_t>> &pair_cost,
                          const std::vector<int64_t> &row_penalty,
                          const std::vector<int64_t> &col_penalty) {
  size_t R = row_penalty.size(), H = col_penalty.size();
  std::vector<bool> col_used(H, false);
  int64_t best = std::numeric_limits<int64_t>::max();
  int64_t col_total = 0;
  for (int64_t c : col_penalty) col_total += c;

  std::function<void(size_t, int64_t, int64_t)> rec = [&](size_t r, int64_t acc,
                                                          int64_t used_cols_penalty) {
    // acc only grows and unmatched columns cost >= 0, so acc bounds from below
    if (acc >= best) return;
    if (r == R) {
      best = std::min(best, acc + (col_total - used_cols_penalty));
      return;
    }
    rec(r + 1, acc + row_penalty[r], used_cols_penalty);  // leave ref r unmatched
    for (size_t h = 0; h < H; ++h) {
      if (col_used[h]) continue;
      col_used[h] = true;
      rec(r + 1, acc + pair_cost[r][h], used_cols_penalty + col_penalty[h]);
      col_used[h] = false;
    }
  };
  rec(0, 0, 0);
  return best;
}

}  // namespace

WerResult TcpWer(const std::vector<SegListEntry> &ref, const std::vector<SegListEntry> &hyp,
                 double collar) {
  auto ref_streams = SpeakerWordStreams(ref);
  auto hyp_streams = SpeakerWordStreams(hyp);
  if (ref_streams.size() > kMaxSpeakers || hyp_streams.size() > kMaxSpeakers)
    throw std::runtime_error("TcpWer: more than 8 speakers per side is unsupported");

  size_t R = ref_streams.size(), H = hyp_streams.size();
  std::vector<std::vector<int64_t>> pair_cost(R, std::vector<int64_t>(H, 0));
  std::vector<int64_t> row_penalty(R), col_penalty(H);
  int64_t total_ref = 0;
  for (size_t r = 0; r < R; ++r) {
    row_penalty[r] = static_cast<int64_t>(ref_streams[r].second.size());
    total_ref += row_penalty[r];
  }
  for (size_t h = 0; h < H; ++h)
    col_penalty[h] = static_cast<int64_t>(hyp_streams[h].second.size());
  for (size_t r = 0; r < R; ++r)
    for (size_t h = 0; h < H; ++h)
      pair_cost[r][h] =
          TimeConstrainedEditDistance(ref_streams[r].second, hyp_streams[h].second, collar);

  WerResult res;
  res.errors = MinAssignmentCost(pair_cost, row_penalty, col_penalty);
  res.ref_len = total_ref;
  if (total_ref == 0) {
    res.infinite = res.errors > 0;
    res.rate = res.infinite ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    res.rate = static_cast<double>(res.errors) / static_cast<double>(total_ref);
  }
  return res;
}

DerResult Der(const ActivityMatrix &ref, const ActivityMatrix &hyp_in, double collar) {
  if (ref.NumSpeakers() > kMaxSpeakers || hyp_in.NumSpeakers() > kMaxSpeakers)
    throw std::runtime_error("Der: more than 8 speakers is unsupported");
  ActivityMatrix hyp = hyp_in;
  if (hyp.frame_rate != ref.frame_rate) hyp = ResampleActivity(hyp, ref.frame_rate);
  double dur_ref = static_cast<double>(ref.num_frames) / ref.frame_rate;
  double dur_hyp = static_cast<double>(hyp.num_frames) / hyp.frame_rate;
  if (std::abs(dur_ref - dur_hyp) > 1.0 / ref.frame_rate + 1e-9)
    throw std::invalid_argument("Der: ref/hyp durations differ");
  int64_t T = std::min(ref.num_frames, hyp.num_frames);
  int64_t S = ref.NumSpeakers(), Hn = hyp.NumSpeakers();

  // Reference segment boundaries (seconds).
  std::vector<double> boundaries;
  for (int64_t s = 0; s < S; ++s) {
    bool active = false;
    for (int64_t t = 0; t <= ref.num_frames; ++t) {
      bool a = t < ref.num_frames && ref.At(s, t) >= 0.5;
      if (a != active) {
        boundaries.push_back(static_cast<double>(t) / ref.frame_rate);
        active = a;
      }
    }
  }

  std::vector<bool> included(static_cast<size_t>(T), true);
  for (int64_t t = 0; t < T; ++t) {
    double mid = (static_cast<double>(t) + 0.5) / ref.frame_rate;
    for (double b : boundaries)
      if (std::abs(mid - b) <= collar) {
        included[static_cast<size_t>(t)] = false;
        break;
      }
  }

  // Per-frame counts plus pairwise co-activity for the speaker mapping.
  int64_t total_ref = 0, missed = 0, fa = 0, minsum = 0;
  std::vector<std::vector<int64_t>> co(static_cast<size_t>(S),
                                       std::vector<int64_t>(static_cast<size_t>(Hn), 0));
  for (int64_t t = 0; t < T; ++t) {
    if (!included[static_cast<size_t>(t)]) continue;
    int nr = 0, nh = 0;
    for (int64_t s = 0; s < S; ++s) nr += ref.At(s, t) >= 0.5 ? 1 : 0;
    for (int64_t h = 0; h < Hn; ++h) nh += hyp.At(h, t) >= 0.5 ? 1 : 0;
    total_ref += nr;
    missed += std::max(0, nr - nh);
    fa += std::max(0, nh - nr);
    minsum += std::min(nr, nh);
    for (int64_t s = 0; s < S; ++s) {
      if (ref.At(s, t) < 0.5) continue;
      for (int64_t h = 0; h < Hn; ++h)
        if (hyp.At(h, t) >= 0.5) ++co[static_cast<size_t>(s)][static_cast<size_t>(h)];
    }
  }
  if (total_ref == 0) throw std::domain_error("Der: zero reference speech time");

  // Exhaustive injective mapping maximizing matched co-activity.
  std::vector<bool> used(static_cast<size_t>(Hn), false);
  int64_t best_correct = 0;
  std::function<void(int64_t, int64_t)> rec = [&](int64_t s, int64_t acc) {
    if (s == S) {
      best_correct = std::max(best_correct, acc);
      return;
    }
    rec(s + 1, acc);
    for (int64_t h = 0; h < Hn; ++h) {
      if (used[static_cast<size_t>(h)]) continue;
      used[static_cast<size_t>(h)] = true;
      rec(s + 1, acc + co[static_cast<size_t>(s)][static_cast<size_t>(h)]);
      used[static_cast<size_t>(h)] = false;
    }
  };
  rec(0, 0);

  int64_t confusion = minsum - best_correct;
  DerResult out;
  double to_sec = 1.0 / ref.frame_rate;
  out.missed = static_cast<double>(missed) * to_sec;
  out.false_alarm = static_cast<double>(fa) * to_sec;
  out.confusion = static_cast<double>(confusion) * to_sec;
  out.ref_speech = static_cast<double>(total_ref) * to_sec;
  out.rate = static_cast<double>(missed + fa + confusion) / static_cast<double>(total_ref);
  return out;
}

double Msce(const std::vector<int> &ref_counts, const std::vector<int> &hyp_counts) {
  if (ref_counts.size() != hyp_counts.size())
    throw std::invalid_argument("Msce: count list length mismatch");
  if (ref_counts.empty()) throw std::invalid_argument("Msce: empty count lists");
  double acc = 0.0;
  for (size_t i = 0; i < ref_counts.size(); ++i)
    acc += std::abs(ref_counts[i] - hyp_counts[i]);
  return acc / static_cast<double>(ref_counts.size());
}

}  // namespace tsasr
