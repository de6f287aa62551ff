// tsasr/tests/acceptance_main.cpp

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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failed criteria. The two training
// criteria share one pair of trained models to stay within the time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsasr/enrollment.hpp"
#include "tsasr/metrics.hpp"
#include "tsasr/model.hpp"
#include "tsasr/stno.hpp"
#include "tsasr/train.hpp"

using namespace tsasr;

namespace {

int g_failed = 0;

void Report(int idx, const std::string &name, bool pass, const std::string &detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

double Seconds(const std::chrono::steady_clock::time_point &t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StnoMask RandomSoftMask(std::mt19937_64 &rng, int64_t T) {
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  StnoMask m;
  m.frame_rate = 50.0;
  m.num_frames = T;
  m.values.resize(static_cast<size_t>(4 * T));
  for (int64_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (int c = 0; c < 4; ++c) {
      m.At(t, c) = unif(rng);
      sum += m.At(t, c);
    }
    for (int c = 0; c < 4; ++c) m.At(t, c) /= sum;
  }
  return m;
}

Tensor RandomTensor(std::mt19937_64 &rng, std::vector<int64_t> shape, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor t(std::move(shape));
  for (double &v : t.data) v = normal(rng);
  return t;
}

// ---------------------------------------------------------------------------
// 1. STNO exactness on 10k random activity matrices.

void Criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_sum_dev = 0.0;
  bool nonneg = true;
  for (int it = 0; it < 10000; ++it) {
    int64_t S = 1 + static_cast<int64_t>(rng() % 5);
    int64_t T = 1 + static_cast<int64_t>(rng() % 100);
    ActivityMatrix m;
    m.frame_rate = 100.0;
    m.num_frames = T;
    for (int64_t s = 0; s < S; ++s) m.speakers.push_back("s" + std::to_string(s));
    m.values.resize(static_cast<size_t>(S * T));
    for (auto &v : m.values) v = unif(rng);
    auto mask = ComputeStno(m, static_cast<int64_t>(rng() % static_cast<uint64_t>(S)));
    for (int64_t t = 0; t < T; ++t) {
      double sum = 0.0;
      for (int c = 0; c < 4; ++c) {
        if (mask.At(t, c) < 0.0) nonneg = false;
        sum += mask.At(t, c);
      }
      worst_sum_dev = std::max(worst_sum_dev, std::abs(sum - 1.0));
    }
  }
  double dt = Seconds(t0);
  bool pass = nonneg && worst_sum_dev < 1e-9 && dt < 5.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "10000 matrices, max |row sum - 1| = %.2e, nonneg=%s, %.2f s",
                worst_sum_dev, nonneg ? "yes" : "NO", dt);
  Report(1, "mask rows are exact probability simplices", pass, buf);
}

// ---------------------------------------------------------------------------
// 2. Finite-difference check of the full conditioned loss.

void Criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.d_model = 16;
  cfg.heads = 4;
  cfg.d_ff = 32;
  cfg.vocab = 16;
  cfg.stride = 2;
  cfg.enroll_window = 10;
  cfg.feat_dim = 24;
  std::mt19937_64 rng(2002);
  Model model(cfg, true, 2002);
  Tensor f = RandomTensor(rng, {40, cfg.feat_dim});   // T = 20 after subsampling
  Tensor ef = RandomTensor(rng, {20, cfg.feat_dim});  // W = 10 after subsampling
  StnoMask mask = RandomSoftMask(rng, 20);
  StnoMask emask = RandomSoftMask(rng, 10);
  std::vector<int> targets(20);
  for (auto &t : targets) t = static_cast<int>(rng() % 17) - 1;  // includes ignores
  targets[0] = 3;                                                // at least one live frame
  auto build = [&]() { return model.Loss(model.Forward(f, mask, &ef, &emask), targets); };
  std::vector<std::pair<std::string, Var>> params(model.Params().begin(), model.Params().end());
  auto res = FiniteDiffCheck(build, params, 1e-5);  // every coordinate
  double dt = Seconds(t0);
  bool pass = res.max_rel_err < 1e-4 && dt < 120.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "max rel err = %.3e at %s, %zu tensors, %.1f s",
                res.max_rel_err, res.worst_param.c_str(), params.size(), dt);
  Report(2, "full-loss gradients match central differences", pass, buf);
}

// ---------------------------------------------------------------------------
// 3. Init-equivalence of the conditioned forward and the plain encoder.

void Criterion3() {
  EncoderConfig cfg;  // default toy scale
  std::mt19937_64 rng(3003);
  Model model(cfg, true, 3003);
  Tensor f = RandomTensor(rng, {60, cfg.feat_dim});
  Tensor ef = RandomTensor(rng, {20, cfg.feat_dim});
  StnoMask pure;
  pure.frame_rate = 50.0;
  pure.num_frames = 30;
  pure.values.assign(120, 0.0);
  for (int64_t t = 0; t < 30; ++t) pure.At(t, StnoMask::kTarget) = 1.0;
  StnoMask emask = RandomSoftMask(rng, 10);
  Var cond = model.Forward(f, pure, &ef, &emask);
  Var plain = model.ForwardPlain(f);
  double max_diff = 0.0;
  for (size_t i = 0; i < cond->value.data.size(); ++i)
    max_diff = std::max(max_diff, std::abs(cond->value.data[i] - plain->value.data[i]));
  char buf[120];
  std::snprintf(buf, sizeof(buf), "max |conditioned - plain| = %.2e", max_diff);
  Report(3, "fresh conditioned model equals the plain encoder", max_diff < 1e-10, buf);
}

// ---------------------------------------------------------------------------
// 4. Enrollment window selector vs exhaustive scan.

void Criterion4() {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int agree = 0;
  const int kCases = 1000;
  for (int it = 0; it < kCases; ++it) {
    int64_t T = 1 + static_cast<int64_t>(rng() % 200);
    int64_t W = 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(T));
    std::vector<double> p(static_cast<size_t>(T));
    // coarse quantization provokes exact ties; earliest window must win.
    // quarters are exact dyadics, so sliding and re-summed scores agree
    // bit-for-bit and tie comparisons are well-defined
    for (auto &v : p) v = std::floor(unif(rng) * 4.0) / 4.0;
    EnrollWindow slow;
    slow.score = -1.0;
    for (int64_t s = 0; s + W <= T; ++s) {
      double sum = 0.0;
      for (int64_t t = s; t < s + W; ++t) sum += p[static_cast<size_t>(t)];
      if (sum > slow.score) slow = {s, s + W, sum};
    }
    auto fast = SelectEnrollment(p, W);
    if (fast.t_start == slow.t_start && fast.t_end == slow.t_end &&
        std::abs(fast.score - slow.score) < 1e-9)
      ++agree;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%d/%d agreement with exhaustive scan incl. ties", agree, kCases);
  Report(4, "window selector matches the exhaustive oracle", agree == kCases, buf);
}

// ---------------------------------------------------------------------------
// 5 & 6. Trained-model criteria (shared training work).

RunConfig AmbiguityTrainConfig(bool enroll, const std::string &out_dir) {
  RunConfig cfg;  // default toy scale: 2 layers, D=32, 4000 steps, batch 16
  cfg.overlap_lo = 1.0;
  cfg.overlap_hi = 1.0;
  cfg.use_enrollment = enroll;
  // Task statistics sized so an enrollment window can cover the vocabulary:
  // 8 tokens, 4-frame runs => ~25 runs per window, ~96% token coverage.
  // Mask augmentations stay off; evaluation runs on oracle masks.
  cfg.model.vocab = 8;
  cfg.synth.vocab = 8;
  cfg.synth.token_run = 4;
  cfg.augment = false;
  // Frozen after the first confirming run: 4 pooled identities and light
  // observation noise keep the base decoding task within reach of the toy
  // model (enrollment 93.8% / no-enrollment 54.4%, the latter against the
  // 56.25% symmetric-perfect ceiling 0.5 + 0.5/V).
  cfg.synth.n_identities = 4;
  cfg.synth.obs_noise = 0.02;
  cfg.base_lr = 1e-3;
  cfg.out_dir = out_dir;
  return cfg;
}

void Criterion5And6() {
  auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories("acceptance_out");

  auto res_plain = Train(AmbiguityTrainConfig(false, "acceptance_out/plain"));
  auto res_enroll = Train(AmbiguityTrainConfig(true, "acceptance_out/enroll"));
  double train_min = Seconds(t0) / 60.0;

  Model plain = Model::LoadCheckpoint(res_plain.checkpoint_path);
  Model enroll = Model::LoadCheckpoint(res_enroll.checkpoint_path);

  SynthConfig synth = AmbiguityTrainConfig(true, "").synth;
  EvalConfig ec;
  ec.n_samples = 100;
  ec.n_speakers = 2;
  ec.overlap = 1.0;
  ec.enroll_interferers = 0;
  ec.use_enrollment = false;
  auto rep_plain = Evaluate(plain, ec, synth);
  ec.use_enrollment = true;
  auto rep_enroll = Evaluate(enroll, ec, synth);

  bool pass5 = rep_plain.ambiguity_accuracy < 0.60 && rep_enroll.ambiguity_accuracy > 0.90 &&
               train_min < 30.0 && rep_plain.ambiguity_frames > 0;
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "identical-conditioning accuracy: no-enroll %.1f%% (<60), enroll %.1f%% (>90), "
                "%lld frames, training %.1f min (<30)",
                100.0 * rep_plain.ambiguity_accuracy, 100.0 * rep_enroll.ambiguity_accuracy,
                static_cast<long long>(rep_plain.ambiguity_frames), train_min);
  Report(5, "enrollment resolves fully-overlapped ambiguity", pass5, buf);

  // 6: enrollment-composition sweep, 2-interferer row across overlap grid.
  EvalConfig base;
  base.n_samples = 100;
  base.n_speakers = 2;
  base.overlap = 1.0;
  base.use_enrollment = true;
  auto cells = Sweep(enroll, base, synth);
  std::vector<double> row2;
  for (const auto &c : cells)
    if (c.interferers == 2) row2.push_back(c.report.frame_accuracy);
  bool grid_ok = cells.size() == 9 && row2.size() == 4 && cells[0].interferers == 0 &&
                 cells[0].overlap == 0.0;
  // non-increasing up to one accuracy point of finite-sample noise
  bool monotone = true;
  for (size_t i = 1; i < row2.size(); ++i)
    if (row2[i] > row2[i - 1] + 0.01) monotone = false;
  double rel_degrade = row2.empty() ? 1.0 : (row2.front() - row2.back()) / row2.front();
  bool pass6 = grid_ok && monotone && rel_degrade < 0.10;
  std::ostringstream det;
  det << "2-interferer accuracy over overlap {.25,.5,.75,1}:";
  for (double a : row2) det << " " << std::round(1000.0 * a) / 10.0 << "%";
  det << ", relative degradation " << std::round(1000.0 * rel_degrade) / 10.0 << "% (<10%)";
  Report(6, "accuracy stays stable as enrollment overlap grows", pass6, det.str());

  // keep a machine-readable record of both experiments
  std::ofstream rec("acceptance_out/ambiguity_and_sweep.json");
  rec << "{\n  \"no_enroll_ambiguity_accuracy\": " << rep_plain.ambiguity_accuracy
      << ",\n  \"enroll_ambiguity_accuracy\": " << rep_enroll.ambiguity_accuracy
      << ",\n  \"sweep_2_interferers\": [";
  for (size_t i = 0; i < row2.size(); ++i) rec << (i ? ", " : "") << row2[i];
  rec << "],\n  \"train_minutes\": " << train_min << "\n}\n";
}

// ---------------------------------------------------------------------------
// 7. tcpWER vs a brute-force permutation + DP oracle.

int64_t OracleTcDp(const std::vector<TimedWord> &ref, const std::vector<TimedWord> &hyp,
                   double collar) {
  // Independent DP written against the metric definition.
  size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j) {
      int64_t best = std::min(d[i - 1][j], d[i][j - 1]) + 1;
      if (std::abs(ref[i - 1].start - hyp[j - 1].start) <= collar)
        best = std::min(best, d[i - 1][j - 1] + (ref[i - 1].text == hyp[j - 1].text ? 0 : 1));
      d[i][j] = best;
    }
  return d[n][m];
}

int64_t OracleTcpErrors(const std::vector<SegListEntry> &ref,
                        const std::vector<SegListEntry> &hyp, double collar) {
  auto rs = SpeakerWordStreams(ref);
  auto hs = SpeakerWordStreams(hyp);
  size_t n = std::max(rs.size(), hs.size());
  std::vector<std::vector<TimedWord>> R(n), H(n);
  for (size_t i = 0; i < rs.size(); ++i) R[i] = rs[i].second;
  for (size_t i = 0; i < hs.size(); ++i) H[i] = hs[i].second;
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int64_t best = std::numeric_limits<int64_t>::max();
  do {
    int64_t total = 0;
    for (size_t i = 0; i < n; ++i) total += OracleTcDp(R[i], H[perm[i]], collar);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<SegListEntry> RandomSegList(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> tdist(0.0, 30.0);
  int n_spk = 1 + static_cast<int>(rng() % 3);
  std::vector<SegListEntry> out;
  for (int s = 0; s < n_spk; ++s) {
    int n_words = static_cast<int>(rng() % 11);
    if (n_words == 0) continue;
    SegListEntry e;
    e.speaker = "spk" + std::to_string(s);
    e.start_time = tdist(rng);
    e.end_time = e.start_time + n_words;
    for (int w = 0; w < n_words; ++w) e.words.push_back("w" + std::to_string(rng() % 6));
    out.push_back(std::move(e));
  }
  return out;
}

void Criterion7() {
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> cdist(0.5, 10.0);
  const int kCases = 500;
  int agree = 0;
  bool self_zero = true, monotone = true;
  for (int it = 0; it < kCases; ++it) {
    auto ref = RandomSegList(rng);
    auto hyp = RandomSegList(rng);
    double collar = cdist(rng);
    if (TcpWer(ref, hyp, collar).errors == OracleTcpErrors(ref, hyp, collar)) ++agree;
    if (TcpWer(ref, ref, collar).errors != 0) self_zero = false;
    int64_t prev = std::numeric_limits<int64_t>::max();
    for (double c : {0.0, 1.0, 2.0, 5.0, 20.0, 1e6}) {
      int64_t e = TcpWer(ref, hyp, c).errors;
      if (e > prev) monotone = false;
      prev = e;
    }
  }
  bool pass = agree == kCases && self_zero && monotone;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d/%d oracle agreement, self-score zero=%s, collar monotone=%s",
                agree, kCases, self_zero ? "yes" : "NO", monotone ? "yes" : "NO");
  Report(7, "time-constrained WER matches the brute-force oracle", pass, buf);
}

// ---------------------------------------------------------------------------
// 8. Speaker-counting and diarization spot checks.

ActivityMatrix MakeActivity(std::vector<std::string> speakers, double rate,
                            std::vector<double> values) {
  ActivityMatrix m;
  m.speakers = std::move(speakers);
  m.frame_rate = rate;
  m.num_frames = static_cast<int64_t>(values.size()) / m.NumSpeakers();
  m.values = std::move(values);
  return m;
}

void Criterion8() {
  bool ok = true;
  std::ostringstream det;

  double msce = Msce({3, 2}, {2, 2});
  ok = ok && msce == 0.5;
  det << "msce=" << msce;

  // 10 s at 10 fps. Reference speaks the first 5 s; hypothesis misses the
  // last 0.5 s of it -> 0.5/5.0 = 0.1.
  std::vector<double> ref_a(100, 0.0), hyp_a(100, 0.0);
  for (int t = 0; t < 50; ++t) ref_a[static_cast<size_t>(t)] = 1.0;
  for (int t = 0; t < 45; ++t) hyp_a[static_cast<size_t>(t)] = 1.0;
  auto miss = Der(MakeActivity({"A"}, 10.0, ref_a), MakeActivity({"A"}, 10.0, hyp_a), 0.0);
  ok = ok && std::abs(miss.rate - 0.1) < 1e-9 && std::abs(miss.missed - 0.5) < 1e-9;
  det << ", miss-case DER=" << miss.rate;

  // Speaker swap halfway with a single hypothesized speaker: half the
  // speech time is confusion whatever the mapping.
  std::vector<double> ref_c(200, 0.0);
  for (int t = 0; t < 50; ++t) ref_c[static_cast<size_t>(t)] = 1.0;         // A: 0-5 s
  for (int t = 150; t < 200; ++t) ref_c[static_cast<size_t>(t)] = 1.0;     // B: 5-10 s
  std::vector<double> hyp_c(100, 1.0);
  auto conf = Der(MakeActivity({"A", "B"}, 10.0, ref_c), MakeActivity({"X"}, 10.0, hyp_c), 0.0);
  ok = ok && std::abs(conf.rate - 0.5) < 1e-9 && std::abs(conf.confusion - 5.0) < 1e-9;
  det << ", confusion-case DER=" << conf.rate;

  // False alarm: hypothesis speaks 1 s longer than the 5 s reference.
  std::vector<double> hyp_f(100, 0.0);
  for (int t = 0; t < 60; ++t) hyp_f[static_cast<size_t>(t)] = 1.0;
  auto fa = Der(MakeActivity({"A"}, 10.0, ref_a), MakeActivity({"A"}, 10.0, hyp_f), 0.0);
  ok = ok && std::abs(fa.rate - 0.2) < 1e-9 && std::abs(fa.false_alarm - 1.0) < 1e-9;
  det << ", fa-case DER=" << fa.rate;

  // A 0.25 s collar absorbs errors inside it: drop only the last two frames
  // (mids 4.85 s and 4.95 s, both within 0.25 s of the 5.0 s boundary).
  std::vector<double> hyp_b = ref_a;
  hyp_b[48] = hyp_b[49] = 0.0;
  auto collar = Der(MakeActivity({"A"}, 10.0, ref_a), MakeActivity({"A"}, 10.0, hyp_b), 0.25);
  ok = ok && collar.rate == 0.0;
  det << ", collar-case DER=" << collar.rate;

  Report(8, "speaker-count and diarization scorers match hand oracles", ok, det.str());
}

// ---------------------------------------------------------------------------
// 9. Bit-exact determinism of training and evaluation.

std::string Slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ReportString(const EvalReport &r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %lld %lld %.17g %d", r.frame_accuracy,
                r.ambiguity_accuracy, static_cast<long long>(r.ambiguity_frames),
                static_cast<long long>(r.total_frames), r.tcp_wer, r.n_samples);
  return buf;
}

void Criterion9() {
  RunConfig cfg;
  cfg.model.layers = 1;
  cfg.model.d_model = 16;
  cfg.model.heads = 2;
  cfg.model.d_ff = 24;
  cfg.model.feat_dim = 12;
  cfg.model.enroll_window = 10;
  cfg.synth.feat_dim = 12;
  cfg.synth.utt_frames = 50;
  cfg.total_steps = 40;
  cfg.warmup_steps = 10;
  cfg.batch_size = 4;
  cfg.seed = 99;

  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    cfg.out_dir = "acceptance_out/det" + std::to_string(run);
    auto res = Train(cfg);
    Model m = Model::LoadCheckpoint(res.checkpoint_path);
    EvalConfig ec;
    ec.n_samples = 10;
    ec.enroll_interferers = 1;
    ec.enroll_overlap = 0.5;
    reports[run] = ReportString(Evaluate(m, ec, cfg.synth));
  }
  bool ckpt_same =
      Slurp("acceptance_out/det0/checkpoint.json") == Slurp("acceptance_out/det1/checkpoint.json");
  bool log_same = Slurp("acceptance_out/det0/log.jsonl") == Slurp("acceptance_out/det1/log.jsonl");
  bool report_same = reports[0] == reports[1];
  bool nonempty = !Slurp("acceptance_out/det0/checkpoint.json").empty();
  bool pass = ckpt_same && log_same && report_same && nonempty;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "checkpoints identical=%s, logs identical=%s, reports identical=%s",
                ckpt_same ? "yes" : "NO", log_same ? "yes" : "NO", report_same ? "yes" : "NO");
  Report(9, "identical seeds reproduce runs bit-exactly", pass, buf);
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion1();
  Criterion2();
  Criterion3();
  Criterion4();
  Criterion7();
  Criterion8();
  Criterion9();
  Criterion5And6();  // training last: the slow part
  std::printf("acceptance: %d/9 criteria passed, %.1f min total\n", 9 - g_failed,
              Seconds(t0) / 60.0);
  return g_failed;
}
