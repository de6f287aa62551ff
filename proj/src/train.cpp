// tsasr/train.cpp

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

#include "tsasr/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tsasr/enrollment.hpp"

namespace tsasr {

double LrAt(int64_t step, double base_lr, int64_t warmup, int64_t total) {
  if (step < 0) throw std::invalid_argument("LrAt: negative step");
  if (step > total) step = total;
  if (step <= warmup) {
    if (warmup == 0) return base_lr;
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup);
  }
  double progress = static_cast<double>(step - warmup) / static_cast<double>(total - warmup);
  return base_lr * 0.5 * (1.0 + std::cos(M_PI * progress));
}

namespace {

int64_t ParseI64(const std::string &v) { return std::stoll(v); }
double ParseF64(const std::string &v) { return std::stod(v); }
bool ParseBool(const std::string &v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean '" + v + "'");
}

}  // namespace

void ApplyConfigOverride(RunConfig &cfg, const std::string &key, const std::string &value) {
  if (key == "layers") cfg.model.layers = static_cast<int>(ParseI64(value));
  else if (key == "d_model") cfg.model.d_model = static_cast<int>(ParseI64(value));
  else if (key == "heads") cfg.model.heads = static_cast<int>(ParseI64(value));
  else if (key == "d_ff") cfg.model.d_ff = static_cast<int>(ParseI64(value));
  else if (key == "vocab") { cfg.model.vocab = static_cast<int>(ParseI64(value)); cfg.synth.vocab = cfg.model.vocab; }
  else if (key == "stride") cfg.model.stride = static_cast<int>(ParseI64(value));
  else if (key == "enroll_window") cfg.model.enroll_window = ParseI64(value);
  else if (key == "feat_dim") { cfg.model.feat_dim = ParseI64(value); cfg.synth.feat_dim = cfg.model.feat_dim; }
  else if (key == "token_run") cfg.synth.token_run = static_cast<int>(ParseI64(value));
  else if (key == "obs_noise") cfg.synth.obs_noise = ParseF64(value);
  else if (key == "utt_frames") cfg.synth.utt_frames = ParseI64(value);
  else if (key == "frame_rate") cfg.synth.frame_rate = ParseF64(value);
  else if (key == "noise_prob") cfg.synth.noise_prob = ParseF64(value);
  else if (key == "noise_std") cfg.synth.noise_std = ParseF64(value);
  else if (key == "embedding_seed") cfg.synth.embedding_seed = std::stoull(value);
  else if (key == "n_identities") cfg.synth.n_identities = static_cast<int>(ParseI64(value));
  else if (key == "n_speakers") cfg.n_speakers = static_cast<int>(ParseI64(value));
  else if (key == "overlap_lo") cfg.overlap_lo = ParseF64(value);
  else if (key == "overlap_hi") cfg.overlap_hi = ParseF64(value);
  else if (key == "enroll_interferers") cfg.enroll_interferers = static_cast<int>(ParseI64(value));
  else if (key == "enroll_overlap_lo") cfg.enroll_overlap_lo = ParseF64(value);
  else if (key == "enroll_overlap_hi") cfg.enroll_overlap_hi = ParseF64(value);
  else if (key == "use_enrollment") cfg.use_enrollment = ParseBool(value);
  else if (key == "base_lr") cfg.base_lr = ParseF64(value);
  else if (key == "warmup_steps") cfg.warmup_steps = ParseI64(value);
  else if (key == "total_steps") cfg.total_steps = ParseI64(value);
  else if (key == "batch_size") cfg.batch_size = static_cast<int>(ParseI64(value));
  else if (key == "augment") cfg.augment = ParseBool(value);
  else if (key == "stno_noise_sigma") cfg.stno_noise_sigma = ParseF64(value);
  else if (key == "stno_noise_prob") cfg.stno_noise_prob = ParseF64(value);
  else if (key == "flip_apply_prob") cfg.flip_apply_prob = ParseF64(value);
  else if (key == "flip_seg_lo") cfg.flip_seg_lo = ParseF64(value);
  else if (key == "flip_seg_hi") cfg.flip_seg_hi = ParseF64(value);
  else if (key == "flip_prob") cfg.flip_prob = ParseF64(value);
  else if (key == "time_masks") cfg.time_masks = static_cast<int>(ParseI64(value));
  else if (key == "max_time") cfg.max_time = static_cast<int>(ParseI64(value));
  else if (key == "freq_masks") cfg.freq_masks = static_cast<int>(ParseI64(value));
  else if (key == "max_freq") cfg.max_freq = static_cast<int>(ParseI64(value));
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "log_every") cfg.log_every = ParseI64(value);
  else if (key == "eval_every") cfg.eval_every = ParseI64(value);
  else if (key == "eval_samples") cfg.eval_samples = static_cast<int>(ParseI64(value));
  else if (key == "eval_seed") cfg.eval_seed = std::stoull(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig ParseRunConfig(const std::string &text) {
  RunConfig cfg;
  std::istringstream iss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(iss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (blank) continue;
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    ApplyConfigOverride(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string RunConfigToJson(const RunConfig &cfg) {
  nlohmann::json j = {
      {"model",
       {{"layers", cfg.model.layers}, {"d_model", cfg.model.d_model}, {"heads", cfg.model.heads},
        {"d_ff", cfg.model.d_ff}, {"vocab", cfg.model.vocab}, {"stride", cfg.model.stride},
        {"enroll_window", cfg.model.enroll_window}, {"feat_dim", cfg.model.feat_dim}}},
      {"synth",
       {{"feat_dim", cfg.synth.feat_dim}, {"vocab", cfg.synth.vocab},
        {"token_run", cfg.synth.token_run}, {"obs_noise", cfg.synth.obs_noise},
        {"utt_frames", cfg.synth.utt_frames}, {"frame_rate", cfg.synth.frame_rate},
        {"noise_prob", cfg.synth.noise_prob}, {"noise_std", cfg.synth.noise_std},
        {"embedding_seed", cfg.synth.embedding_seed},
        {"n_identities", cfg.synth.n_identities}}},
      {"data",
       {{"n_speakers", cfg.n_speakers}, {"overlap_lo", cfg.overlap_lo},
        {"overlap_hi", cfg.overlap_hi}, {"enroll_interferers", cfg.enroll_interferers},
        {"enroll_overlap_lo", cfg.enroll_overlap_lo},
        {"enroll_overlap_hi", cfg.enroll_overlap_hi}}},
      {"optim",
       {{"base_lr", cfg.base_lr}, {"warmup_steps", cfg.warmup_steps},
        {"total_steps", cfg.total_steps}, {"batch_size", cfg.batch_size}}},
      {"augment",
       {{"enabled", cfg.augment}, {"stno_noise_sigma", cfg.stno_noise_sigma},
        {"stno_noise_prob", cfg.stno_noise_prob}, {"flip_apply_prob", cfg.flip_apply_prob},
        {"flip_seg_lo", cfg.flip_seg_lo}, {"flip_seg_hi", cfg.flip_seg_hi},
        {"flip_prob", cfg.flip_prob}, {"time_masks", cfg.time_masks},
        {"max_time", cfg.max_time}, {"freq_masks", cfg.freq_masks}, {"max_freq", cfg.max_freq}}},
      {"use_enrollment", cfg.use_enrollment},
      {"seed", cfg.seed},
      {"out_dir", cfg.out_dir},
      {"log_every", cfg.log_every},
      {"eval_every", cfg.eval_every},
      {"eval_samples", cfg.eval_samples},
      {"eval_seed", cfg.eval_seed}};
  return j.dump(2);
}

void AdamOptimizer::Step(std::map<std::string, Var> &params, double lr) {
  ++t;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (auto &[name, p] : params) {
    auto &mm = m[name];
    auto &vv = v[name];
    if (mm.size() != p->value.data.size()) mm.assign(p->value.data.size(), 0.0);
    if (vv.size() != p->value.data.size()) vv.assign(p->value.data.size(), 0.0);
    p->EnsureGrad();
    for (size_t i = 0; i < p->value.data.size(); ++i) {
      double g = p->grad.data[i];
      mm[i] = beta1 * mm[i] + (1.0 - beta1) * g;
      vv[i] = beta2 * vv[i] + (1.0 - beta2) * g * g;
      double mhat = mm[i] / bc1;
      double vhat = vv[i] / bc2;
      p->value.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

PreparedSample PrepareSample(const MixtureSample &sample, int target, const RunConfig &cfg,
                             const Tensor &embeddings, std::mt19937_64 &rng, bool train_mode) {
  PreparedSample out;
  out.features = sample.features;
  StnoMask mask = ComputeStno(sample.activity, target);

  bool augment = train_mode && cfg.augment;
  if (augment) {
    mask = StnoGaussianNoise(mask, cfg.stno_noise_sigma, cfg.stno_noise_prob, rng);
    mask = StnoSegmentFlip(mask, cfg.flip_apply_prob, cfg.flip_seg_lo, cfg.flip_seg_hi,
                           cfg.flip_prob, rng);
    JointSpecAugment(out.features, mask, cfg.time_masks, cfg.max_time, cfg.freq_masks,
                     cfg.max_freq, rng);
  }

  int stride = cfg.model.stride;
  out.stno = PoolMask(mask, stride);
  int64_t T_post = out.stno.num_frames;
  out.targets.assign(static_cast<size_t>(T_post), -1);
  const auto &transcript = sample.transcripts[static_cast<size_t>(target)];
  for (int64_t t = 0; t < T_post; ++t) {
    int64_t raw = std::min<int64_t>(t * stride, sample.features.Rows() - 1);
    out.targets[static_cast<size_t>(t)] = transcript[static_cast<size_t>(raw)];
  }

  if (!cfg.use_enrollment) return out;

  // Enrollment mixture from the second half of the target's token stream,
  // so the main-mixture content is never reused.
  int64_t L = cfg.synth.utt_frames;
  const SpeakerProfile &prof = sample.speakers[static_cast<size_t>(target)];
  EnrollStream tgt_stream{prof.speaker_id,
                          RenderFrames(prof, embeddings, L, 2 * L, cfg.synth.obs_noise, rng)};
  std::vector<EnrollStream> interferers;
  std::vector<std::vector<double>> used;
  Tensor pool;
  if (cfg.synth.n_identities > 0)
    pool = MakeIdentityPool(cfg.synth.n_identities, cfg.synth.feat_dim,
                            cfg.synth.embedding_seed + 1);
  for (int i = 0; i < cfg.enroll_interferers; ++i) {
    // interferers are bystanders: sharing an identity with any main-mixture
    // speaker would make a fully overlapped enrollment window ambiguous in
    // exactly the way the enrollment exists to resolve
    SpeakerProfile ip;
    bool clash = true;
    while (clash) {
      ip = GenerateSpeaker(rng, cfg.synth.feat_dim, cfg.synth.vocab, L, cfg.synth.token_run,
                           "enr_int" + std::to_string(i),
                           cfg.synth.n_identities > 0 ? &pool : nullptr);
      clash = std::any_of(sample.speakers.begin(), sample.speakers.end(),
                          [&](const SpeakerProfile &q) { return ip.identity == q.identity; }) ||
              std::any_of(used.begin(), used.end(),
                          [&](const std::vector<double> &q) { return ip.identity == q; });
    }
    used.push_back(ip.identity);
    interferers.push_back(
        {ip.speaker_id, RenderFrames(ip, embeddings, 0, L, cfg.synth.obs_noise, rng)});
  }
  std::uniform_real_distribution<double> rho_dist(cfg.enroll_overlap_lo, cfg.enroll_overlap_hi);
  double rho = interferers.empty() ? 0.0 : rho_dist(rng);
  auto [enr_feats, enr_activity] =
      BuildEnrollmentMixture(tgt_stream, interferers, rho, rng, cfg.synth.frame_rate);

  StnoMask enr_mask = ComputeStno(enr_activity, 0);
  if (augment) {
    enr_mask = StnoGaussianNoise(enr_mask, cfg.stno_noise_sigma, cfg.stno_noise_prob, rng);
    enr_mask = StnoSegmentFlip(enr_mask, cfg.flip_apply_prob, cfg.flip_seg_lo, cfg.flip_seg_hi,
                               cfg.flip_prob, rng);
  }
  StnoMask enr_post = PoolMask(enr_mask, stride);

  int64_t W = cfg.model.enroll_window;
  EnrollWindow win = SelectEnrollment(enr_post.Column(StnoMask::kTarget), W);
  int64_t w = win.t_end - win.t_start;
  int64_t raw_len = w * stride;
  int64_t raw_start = win.t_start * stride;
  int64_t T0e = enr_feats.Rows();
  if (raw_start + raw_len > T0e) raw_start = ((T0e - raw_len) / stride) * stride;

  out.has_enrollment = true;
  out.enroll_features = Tensor({raw_len, enr_feats.Cols()});
  std::copy(enr_feats.data.begin() + raw_start * enr_feats.Cols(),
            enr_feats.data.begin() + (raw_start + raw_len) * enr_feats.Cols(),
            out.enroll_features.data.begin());
  out.enroll_stno.frame_rate = enr_post.frame_rate;
  out.enroll_stno.num_frames = w;
  out.enroll_stno.values.assign(enr_post.values.begin() + (raw_start / stride) * 4,
                                enr_post.values.begin() + (raw_start / stride + w) * 4);
  return out;
}

namespace {

double RunSample(Model &model, const PreparedSample &ps, double loss_scale, bool do_backward,
                 double *accuracy_out = nullptr) {
  Var logits = model.Forward(ps.features, ps.stno,
                             ps.has_enrollment ? &ps.enroll_features : nullptr,
                             ps.has_enrollment ? &ps.enroll_stno : nullptr);
  Var loss = model.Loss(logits, ps.targets);
  if (accuracy_out) {
    int64_t correct = 0, total = 0;
    int64_t V = logits->value.Cols();
    for (int64_t t = 0; t < logits->value.Rows(); ++t) {
      int tgt = ps.targets[static_cast<size_t>(t)];
      if (tgt < 0) continue;
      const double *row = &logits->value.data[t * V];
      int arg = static_cast<int>(std::max_element(row, row + V) - row);
      correct += arg == tgt ? 1 : 0;
      ++total;
    }
    *accuracy_out = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  }
  if (do_backward) Backward(Scale(loss, loss_scale));
  return loss->value.data[0];
}

uint64_t Fnv1aFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

TrainResult Train(const RunConfig &cfg) {
  if (cfg.batch_size < 1 || cfg.warmup_steps > cfg.total_steps)
    throw std::invalid_argument("Train: invalid optimizer config");
  int needed = cfg.n_speakers + (cfg.use_enrollment ? cfg.enroll_interferers : 0);
  if (cfg.synth.n_identities > 0 && cfg.synth.n_identities < needed)
    throw std::invalid_argument("Train: identity pool too small for mixture composition");
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream log(cfg.out_dir + "/log.jsonl");

  Tensor embeddings =
      MakeTokenEmbeddings(cfg.synth.vocab, cfg.synth.feat_dim, cfg.synth.embedding_seed);
  Model model(cfg.model, cfg.use_enrollment, cfg.seed);
  AdamOptimizer opt;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> target_dist(0, cfg.n_speakers - 1);

  TrainResult result;
  double step_loss = 0.0;
  for (int64_t step = 0; step < cfg.total_steps; ++step) {
    double lr = LrAt(step + 1, cfg.base_lr, cfg.warmup_steps, cfg.total_steps);
    model.ZeroGrads();
    step_loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      MixtureSample sample =
          GenerateMixture(cfg.n_speakers, cfg.overlap_lo, cfg.overlap_hi, rng, cfg.synth, embeddings);
      int target = target_dist(rng);
      PreparedSample ps = PrepareSample(sample, target, cfg, embeddings, rng, true);
      double l = RunSample(model, ps, 1.0 / static_cast<double>(cfg.batch_size), true);
      if (!std::isfinite(l)) {
        nlohmann::json diag = {{"step", step}, {"batch_index", b}, {"loss", l}, {"lr", lr}};
        std::ofstream d(cfg.out_dir + "/diagnostics.json");
        d << diag.dump(2);
        throw std::runtime_error("Train: non-finite loss at step " + std::to_string(step));
      }
      step_loss += l / static_cast<double>(cfg.batch_size);
    }
    if (step == 0) result.initial_loss = step_loss;
    opt.Step(model.Params(), lr);

    bool log_now = cfg.log_every > 0 && (step % cfg.log_every == 0 || step + 1 == cfg.total_steps);
    if (log_now) {
      nlohmann::json rec = {{"step", step}, {"loss", step_loss}, {"lr", lr}};
      if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
        EvalConfig ec;
        ec.n_samples = cfg.eval_samples;
        ec.seed = cfg.eval_seed;
        ec.n_speakers = cfg.n_speakers;
        ec.enroll_interferers = cfg.enroll_interferers;
        ec.use_enrollment = cfg.use_enrollment;
        rec["eval_acc"] = Evaluate(model, ec, cfg.synth).frame_accuracy;
      }
      log << rec.dump() << "\n";
      log.flush();
    }
  }
  result.final_loss = step_loss;

  result.checkpoint_path = cfg.out_dir + "/checkpoint.json";
  model.SaveCheckpoint(result.checkpoint_path);

  nlohmann::json manifest = {
      {"tool", "tsasr"},
      {"version", "0.1.0"},
      {"seed", cfg.seed},
      {"config", nlohmann::json::parse(RunConfigToJson(cfg))},
      {"outputs",
       {{"checkpoint", {{"path", "checkpoint.json"},
                        {"fnv1a", Fnv1aFile(result.checkpoint_path)}}},
        {"log", {{"path", "log.jsonl"}, {"fnv1a", Fnv1aFile(cfg.out_dir + "/log.jsonl")}}}}},
      {"initial_loss", result.initial_loss},
      {"final_loss", result.final_loss}};
  std::ofstream mf(cfg.out_dir + "/manifest.json");
  mf << manifest.dump(2);
  return result;
}

std::vector<SegListEntry> TokensToSegList(const std::vector<int> &tokens, double frame_rate,
                                          const std::string &speaker) {
  std::vector<SegListEntry> entries;
  size_t t = 0;
  while (t < tokens.size()) {
    if (tokens[t] < 0) {
      ++t;
      continue;
    }
    size_t start = t;
    while (t < tokens.size() && tokens[t] == tokens[start]) ++t;
    SegListEntry e;
    e.speaker = speaker;
    e.start_time = static_cast<double>(start) / frame_rate;
    e.end_time = static_cast<double>(t) / frame_rate;
    e.words.push_back("w" + std::to_string(tokens[start]));
    entries.push_back(std::move(e));
  }
  return entries;
}

EvalReport Evaluate(const Model &model, const EvalConfig &ecfg, const SynthConfig &synth) {
  Tensor embeddings = MakeTokenEmbeddings(synth.vocab, synth.feat_dim, synth.embedding_seed);
  std::mt19937_64 rng(ecfg.seed);

  RunConfig pipeline;  // conditioning pipeline settings for eval-time samples
  pipeline.model = model.Config();
  pipeline.synth = synth;
  pipeline.use_enrollment = ecfg.use_enrollment && model.UsesEnrollment();
  pipeline.enroll_interferers = ecfg.enroll_interferers;
  pipeline.enroll_overlap_lo = ecfg.enroll_overlap;
  pipeline.enroll_overlap_hi = ecfg.enroll_overlap;
  pipeline.n_speakers = ecfg.n_speakers;

  EvalReport rep;
  rep.n_samples = ecfg.n_samples;
  int64_t correct = 0, total = 0, amb_correct = 0, amb_total = 0;
  int64_t tcp_errors = 0, tcp_ref = 0;

  for (int i = 0; i < ecfg.n_samples; ++i) {
    MixtureSample sample = GenerateMixture(ecfg.n_speakers, ecfg.overlap, ecfg.overlap, rng,
                                           synth, embeddings);
    // Identical conditioning across targets marks the ambiguous case.
    bool ambiguous = true;
    StnoMask first = ComputeStno(sample.activity, 0);
    for (int k = 1; k < ecfg.n_speakers && ambiguous; ++k) {
      StnoMask mk = ComputeStno(sample.activity, k);
      for (size_t j = 0; j < mk.values.size(); ++j)
        if (std::abs(mk.values[j] - first.values[j]) > 1e-12) {
          ambiguous = false;
          break;
        }
    }

    std::vector<SegListEntry> ref_all, hyp_all;
    for (int k = 0; k < ecfg.n_speakers; ++k) {
      PreparedSample ps = PrepareSample(sample, k, pipeline, embeddings, rng, false);
      Var logits = const_cast<Model &>(model).Forward(
          ps.features, ps.stno, ps.has_enrollment ? &ps.enroll_features : nullptr,
          ps.has_enrollment ? &ps.enroll_stno : nullptr);
      int64_t V = logits->value.Cols();
      std::vector<int> predicted(static_cast<size_t>(logits->value.Rows()));
      for (int64_t t = 0; t < logits->value.Rows(); ++t) {
        const double *row = &logits->value.data[t * V];
        predicted[static_cast<size_t>(t)] =
            static_cast<int>(std::max_element(row, row + V) - row);
        int tgt = ps.targets[static_cast<size_t>(t)];
        if (tgt < 0) continue;
        bool ok = predicted[static_cast<size_t>(t)] == tgt;
        correct += ok ? 1 : 0;
        ++total;
        if (ambiguous) {
          amb_correct += ok ? 1 : 0;
          ++amb_total;
        }
      }
      double post_rate = synth.frame_rate / static_cast<double>(model.Config().stride);
      auto ref_entries = TokensToSegList(sample.transcripts[static_cast<size_t>(k)],
                                         synth.frame_rate, "spk" + std::to_string(k));
      auto hyp_entries = TokensToSegList(predicted, post_rate, "hyp" + std::to_string(k));
      ref_all.insert(ref_all.end(), ref_entries.begin(), ref_entries.end());
      hyp_all.insert(hyp_all.end(), hyp_entries.begin(), hyp_entries.end());
    }
    WerResult wr = TcpWer(ref_all, hyp_all, ecfg.tcp_collar);
    tcp_errors += wr.errors;
    tcp_ref += wr.ref_len;
  }

  rep.frame_accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  rep.ambiguity_accuracy =
      amb_total ? static_cast<double>(amb_correct) / static_cast<double>(amb_total) : 0.0;
  rep.ambiguity_frames = amb_total;
  rep.total_frames = total;
  rep.tcp_wer = tcp_ref ? static_cast<double>(tcp_errors) / static_cast<double>(tcp_ref) : 0.0;
  return rep;
}

std::vector<SweepCell> Sweep(const Model &model, const EvalConfig &base, const SynthConfig &synth) {
  std::vector<SweepCell> cells;
  const double overlaps[] = {0.25, 0.5, 0.75, 1.0};
  for (int interferers = 0; interferers <= 2; ++interferers) {
    EvalConfig ec = base;
    ec.enroll_interferers = interferers;
    if (interferers == 0) {
      ec.enroll_overlap = 0.0;
      cells.push_back({0, 0.0, Evaluate(model, ec, synth)});
      continue;
    }
    for (double ov : overlaps) {
      ec.enroll_overlap = ov;
      cells.push_back({interferers, ov, Evaluate(model, ec, synth)});
    }
  }
  return cells;
}

}  // namespace tsasr
