// tsasr/diar_io.cpp

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

#include "tsasr/diar_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace tsasr {

namespace {

std::vector<std::string> SplitWhitespace(const std::string &line) {
  std::vector<std::string> fields;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) fields.push_back(tok);
  return fields;
}

bool ParseDouble(const std::string &s, double *out) {
  try {
    size_t pos = 0;
    *out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception &) {
    return false;
  }
}

}  // namespace

std::vector<RttmRecord> ParseRttm(const std::string &text) {
  std::vector<RttmRecord> records;
  std::istringstream iss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(iss, line)) {
    ++lineno;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields[0] != "SPEAKER") continue;
    if (fields.size() < 9) throw ParseError(lineno, "expected >= 9 fields on SPEAKER line");
    RttmRecord rec;
    rec.recording_id = fields[1];
    if (!ParseDouble(fields[3], &rec.onset)) throw ParseError(lineno, "non-numeric onset");
    if (!ParseDouble(fields[4], &rec.duration)) throw ParseError(lineno, "non-numeric duration");
    if (rec.onset < 0) throw ParseError(lineno, "onset < 0");
    if (rec.duration <= 0) throw ParseError(lineno, "duration <= 0");
    rec.speaker = fields[7];
    if (rec.speaker.empty()) throw ParseError(lineno, "empty speaker label");
    records.push_back(std::move(rec));
  }
  return records;
}

std::string SerializeRttm(const std::vector<RttmRecord> &records) {
  std::string out;
  char buf[512];
  for (const auto &r : records) {
    std::snprintf(buf, sizeof(buf), "SPEAKER %s 1 %.3f %.3f <NA> <NA> %s <NA> <NA>\n",
                  r.recording_id.c_str(), r.onset, r.duration, r.speaker.c_str());
    out += buf;
  }
  return out;
}

ActivityMatrix SegmentsToActivity(const std::vector<RttmRecord> &records, double frame_rate,
                                  double total_duration) {
  if (frame_rate <= 0) throw std::invalid_argument("SegmentsToActivity: frame_rate <= 0");
  for (const auto &r : records)
    if (r.onset + r.duration > total_duration + 1e-9)
      throw std::invalid_argument("SegmentsToActivity: segment past total_duration");

  ActivityMatrix m;
  m.frame_rate = frame_rate;
  m.num_frames = static_cast<int64_t>(std::ceil(total_duration * frame_rate));
  for (const auto &r : records)
    if (std::find(m.speakers.begin(), m.speakers.end(), r.speaker) == m.speakers.end())
      m.speakers.push_back(r.speaker);
  m.values.assign(static_cast<size_t>(m.NumSpeakers() * m.num_frames), 0.0);

  for (const auto &r : records) {
    int64_t s = std::find(m.speakers.begin(), m.speakers.end(), r.speaker) - m.speakers.begin();
    for (int64_t t = 0; t < m.num_frames; ++t) {
      double mid = (static_cast<double>(t) + 0.5) / frame_rate;
      if (mid >= r.onset && mid < r.onset + r.duration) m.At(s, t) = 1.0;
    }
  }
  return m;
}

ActivityMatrix ResampleActivity(const ActivityMatrix &m, double target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("ResampleActivity: target_rate <= 0");
  if (target_rate == m.frame_rate) return m;

  double duration = static_cast<double>(m.num_frames) / m.frame_rate;
  ActivityMatrix out;
  out.speakers = m.speakers;
  out.frame_rate = target_rate;
  out.num_frames = static_cast<int64_t>(std::ceil(duration * target_rate));
  out.values.assign(static_cast<size_t>(out.NumSpeakers() * out.num_frames), 0.0);

  for (int64_t to = 0; to < out.num_frames; ++to) {
    double lo = static_cast<double>(to) / target_rate;
    double hi = static_cast<double>(to + 1) / target_rate;
    // source frames whose midpoint lands in [lo, hi)
    std::vector<int64_t> src;
    for (int64_t ts = 0; ts < m.num_frames; ++ts) {
      double mid = (static_cast<double>(ts) + 0.5) / m.frame_rate;
      if (mid >= lo && mid < hi) src.push_back(ts);
    }
    if (src.empty()) {
      double center = 0.5 * (lo + hi);
      int64_t nearest = std::clamp(
          static_cast<int64_t>(std::floor(center * m.frame_rate)), int64_t{0}, m.num_frames - 1);
      src.push_back(nearest);
    }
    for (int64_t s = 0; s < out.NumSpeakers(); ++s) {
      double acc = 0.0;
      for (int64_t ts : src) acc += m.At(s, ts);
      out.At(s, to) = acc / static_cast<double>(src.size());
    }
  }
  return out;
}

std::vector<SegListEntry> ParseSegListJson(const std::string &json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (!j.is_array()) throw std::invalid_argument("seglist: top level must be an array");
  std::vector<SegListEntry> entries;
  for (const auto &e : j) {
    SegListEntry s;
    s.speaker = e.at("speaker").get<std::string>();
    s.start_time = e.at("start_time").get<double>();
    s.end_time = e.at("end_time").get<double>();
    std::istringstream iss(e.at("words").get<std::string>());
    std::string w;
    while (iss >> w) s.words.push_back(w);
    if (s.end_time < s.start_time)
      throw std::invalid_argument("seglist: end_time < start_time");
    entries.push_back(std::move(s));
  }
  return entries;
}

std::string SerializeSegListJson(const std::vector<SegListEntry> &entries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &e : entries) {
    std::string words;
    for (size_t i = 0; i < e.words.size(); ++i) {
      if (i) words += ' ';
      words += e.words[i];
    }
    arr.push_back({{"speaker", e.speaker},
                   {"start_time", e.start_time},
                   {"end_time", e.end_time},
                   {"words", words}});
  }
  return arr.dump(2);
}

}  // namespace tsasr
