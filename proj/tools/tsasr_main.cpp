// tsasr/tsasr_main.cpp

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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsasr/diar_io.hpp"
#include "tsasr/metrics.hpp"
#include "tsasr/model.hpp"
#include "tsasr/synth.hpp"
#include "tsasr/train.hpp"

namespace {

using namespace tsasr;

std::string ReadFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig LoadConfig(const std::string &config_path, const std::vector<std::string> &overrides) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = ParseRunConfig(ReadFile(config_path));
  for (const auto &ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got '" + ov + "'");
    ApplyConfigOverride(cfg, ov.substr(0, eq), ov.substr(eq + 1));
  }
  return cfg;
}

uint64_t Fnv1a(const std::string &bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int CmdSynth(const std::string &config_path, const std::vector<std::string> &overrides,
             const std::string &out_dir, int count) {
  RunConfig cfg = LoadConfig(config_path, overrides);
  std::filesystem::create_directories(out_dir);
  Tensor emb = MakeTokenEmbeddings(cfg.synth.vocab, cfg.synth.feat_dim, cfg.synth.embedding_seed);
  std::mt19937_64 rng(cfg.seed);
  nlohmann::json files = nlohmann::json::array();
  for (int i = 0; i < count; ++i) {
    MixtureSample s =
        GenerateMixture(cfg.n_speakers, cfg.overlap_lo, cfg.overlap_hi, rng, cfg.synth, emb);
    char name[64];
    std::snprintf(name, sizeof(name), "sample_%04d", i);
    std::string bin_path = out_dir + "/" + name + ".features.f64";
    {
      std::ofstream bin(bin_path, std::ios::binary);
      bin.write(reinterpret_cast<const char *>(s.features.data.data()),
                static_cast<std::streamsize>(s.features.data.size() * sizeof(double)));
    }
    nlohmann::json side;
    side["shape"] = s.features.shape;
    side["frame_rate"] = cfg.synth.frame_rate;
    nlohmann::json activity = nlohmann::json::array();
    for (int64_t sp = 0; sp < s.activity.NumSpeakers(); ++sp) {
      nlohmann::json segs = nlohmann::json::array();
      int64_t t = 0;
      while (t < s.activity.num_frames) {
        if (s.activity.At(sp, t) < 0.5) { ++t; continue; }
        int64_t a = t;
        while (t < s.activity.num_frames && s.activity.At(sp, t) >= 0.5) ++t;
        segs.push_back({{"start", a / cfg.synth.frame_rate}, {"end", t / cfg.synth.frame_rate}});
      }
      activity.push_back({{"speaker", s.activity.speakers[static_cast<size_t>(sp)]},
                          {"segments", segs}});
    }
    side["activity"] = activity;
    side["transcripts"] = s.transcripts;
    std::string side_path = out_dir + "/" + name + ".json";
    std::ofstream(side_path) << side.dump(2);
    files.push_back({{"features", std::string(name) + ".features.f64"},
                     {"sidecar", std::string(name) + ".json"}});
  }
  nlohmann::json manifest = {{"tool", "tsasr"},
                             {"version", "0.1.0"},
                             {"seed", cfg.seed},
                             {"count", count},
                             {"config", nlohmann::json::parse(RunConfigToJson(cfg))},
                             {"files", files}};
  std::ofstream(out_dir + "/manifest.json") << manifest.dump(2);
  std::cout << "wrote " << count << " samples to " << out_dir << "\n";
  return 0;
}

nlohmann::json ReportToJson(const EvalReport &r) {
  return {{"frame_accuracy", r.frame_accuracy},
          {"ambiguity_accuracy", r.ambiguity_accuracy},
          {"ambiguity_frames", r.ambiguity_frames},
          {"total_frames", r.total_frames},
          {"tcp_wer", r.tcp_wer},
          {"n_samples", r.n_samples}};
}

int CmdEval(const std::string &checkpoint, EvalConfig ecfg, const std::string &config_path,
            const std::vector<std::string> &overrides, const std::string &out_dir) {
  RunConfig cfg = LoadConfig(config_path, overrides);
  Model model = Model::LoadCheckpoint(checkpoint);
  EvalReport rep = Evaluate(model, ecfg, cfg.synth);
  nlohmann::json j = ReportToJson(rep);
  std::cout << j.dump(2) << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir + "/report.json") << j.dump(2);
    nlohmann::json manifest = {{"tool", "tsasr"},
                               {"version", "0.1.0"},
                               {"checkpoint", checkpoint},
                               {"eval_seed", ecfg.seed},
                               {"config", nlohmann::json::parse(RunConfigToJson(cfg))},
                               {"report_fnv1a", Fnv1a(j.dump(2))}};
    std::ofstream(out_dir + "/manifest.json") << manifest.dump(2);
  }
  return 0;
}

int CmdSweep(const std::string &checkpoint, EvalConfig base, const std::string &config_path,
             const std::vector<std::string> &overrides, const std::string &out_dir) {
  RunConfig cfg = LoadConfig(config_path, overrides);
  Model model = Model::LoadCheckpoint(checkpoint);
  auto cells = Sweep(model, base, cfg.synth);
  nlohmann::json grid = nlohmann::json::array();
  for (const auto &c : cells)
    grid.push_back({{"interferers", c.interferers},
                    {"enroll_overlap", c.overlap},
                    {"report", ReportToJson(c.report)}});
  std::cout << grid.dump(2) << "\n";

  std::cout << "\ncomposition            ";
  for (double ov : {0.0, 0.25, 0.5, 0.75, 1.0}) std::cout << "  " << ov * 100 << "%";
  std::cout << "\n";
  for (int i = 0; i <= 2; ++i) {
    std::cout << "target + " << i << " interferer" << (i == 1 ? " " : "s");
    for (double ov : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      bool present = false;
      for (const auto &c : cells)
        if (c.interferers == i && c.overlap == ov) {
          std::printf("  %.3f", c.report.frame_accuracy);
          present = true;
        }
      if (!present) std::cout << "  --  ";
    }
    std::cout << "\n";
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir + "/sweep.json") << grid.dump(2);
  }
  return 0;
}

void PrintScoreReport(const std::string &metric, double value,
                      const nlohmann::json &details) {
  nlohmann::json rep = {{"per_recording", nlohmann::json::array({details})},
                        {"macro_average", value},
                        {"micro_average", value}};
  std::cout << rep.dump(2) << "\n";
  std::printf("%-8s %10.6f\n", metric.c_str(), value);
}

int CmdScoreTcpwer(const std::string &ref_path, const std::string &hyp_path, double collar) {
  auto ref = ParseSegListJson(ReadFile(ref_path));
  auto hyp = ParseSegListJson(ReadFile(hyp_path));
  WerResult r = TcpWer(ref, hyp, collar);
  nlohmann::json det = {{"errors", r.errors}, {"ref_len", r.ref_len},
                        {"rate", r.infinite ? -1.0 : r.rate}, {"infinite", r.infinite}};
  PrintScoreReport("tcpwer", r.rate, det);
  return 0;
}

int CmdScoreDer(const std::string &ref_path, const std::string &hyp_path, double collar,
                double frame_rate) {
  auto ref_recs = ParseRttm(ReadFile(ref_path));
  auto hyp_recs = ParseRttm(ReadFile(hyp_path));
  double dur = 0.0;
  for (const auto &r : ref_recs) dur = std::max(dur, r.onset + r.duration);
  for (const auto &r : hyp_recs) dur = std::max(dur, r.onset + r.duration);
  auto ref = SegmentsToActivity(ref_recs, frame_rate, dur);
  auto hyp = SegmentsToActivity(hyp_recs, frame_rate, dur);
  DerResult d = Der(ref, hyp, collar);
  nlohmann::json det = {{"missed", d.missed}, {"false_alarm", d.false_alarm},
                        {"confusion", d.confusion}, {"ref_speech", d.ref_speech},
                        {"rate", d.rate}};
  PrintScoreReport("der", d.rate, det);
  return 0;
}

int CmdScoreMsce(const std::string &ref_path, const std::string &hyp_path) {
  auto ref = nlohmann::json::parse(ReadFile(ref_path)).get<std::vector<int>>();
  auto hyp = nlohmann::json::parse(ReadFile(hyp_path)).get<std::vector<int>>();
  double v = Msce(ref, hyp);
  PrintScoreReport("msce", v, {{"ref_counts", ref}, {"hyp_counts", hyp}});
  return 0;
}

int CmdCheckGrads(int coords, uint64_t seed) {
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.d_model = 16;
  cfg.heads = 4;
  cfg.d_ff = 32;
  cfg.vocab = 8;
  cfg.feat_dim = 12;
  cfg.stride = 2;
  cfg.enroll_window = 10;
  Model model(cfg, true, seed);

  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor feats({40, cfg.feat_dim});
  for (double &v : feats.data) v = normal(rng);
  Tensor enroll({20, cfg.feat_dim});
  for (double &v : enroll.data) v = normal(rng);
  auto random_mask = [&](int64_t T) {
    StnoMask m;
    m.frame_rate = 50.0;
    m.num_frames = T;
    m.values.resize(static_cast<size_t>(T * 4));
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    for (int64_t t = 0; t < T; ++t) {
      double sum = 0.0;
      for (int c = 0; c < 4; ++c) {
        m.At(t, c) = unif(rng);
        sum += m.At(t, c);
      }
      for (int c = 0; c < 4; ++c) m.At(t, c) /= sum;
    }
    return m;
  };
  StnoMask stno = random_mask(20), enroll_stno = random_mask(10);
  std::vector<int> targets(20);
  std::uniform_int_distribution<int> tok(0, cfg.vocab - 1);
  for (auto &t : targets) t = tok(rng);
  targets[3] = -1;  // exercise the ignore path

  std::vector<std::pair<std::string, Var>> params(model.Params().begin(), model.Params().end());
  auto build = [&]() {
    return model.Loss(model.Forward(feats, stno, &enroll, &enroll_stno), targets);
  };
  GradCheckResult res = FiniteDiffCheck(build, params, 1e-5, coords);
  std::printf("max relative error: %.3e (param %s, coord %lld)\n", res.max_rel_err,
              res.worst_param.c_str(), static_cast<long long>(res.worst_coord));
  return res.max_rel_err < 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"target-speaker ASR conditioning toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint, ref_path, hyp_path;
  std::vector<std::string> overrides;
  int count = 16;
  double collar = 5.0, frame_rate = 100.0;
  int coords = 25;
  uint64_t seed = 7;

  auto *synth = app.add_subcommand("synth", "dump a synthetic dataset");
  synth->add_option("--config", config_path);
  synth->add_option("--set", overrides, "config override key=value");
  synth->add_option("--out", out_dir)->required();
  synth->add_option("--count", count);

  auto *train = app.add_subcommand("train", "train a model");
  train->add_option("--config", config_path);
  train->add_option("--set", overrides, "config override key=value");

  EvalConfig ecfg;
  bool no_enrollment = false;
  auto *eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--config", config_path);
  eval->add_option("--set", overrides);
  eval->add_option("--samples", ecfg.n_samples);
  eval->add_option("--seed", ecfg.seed);
  eval->add_option("--speakers", ecfg.n_speakers);
  eval->add_option("--overlap", ecfg.overlap);
  eval->add_option("--interferers", ecfg.enroll_interferers);
  eval->add_option("--enroll-overlap", ecfg.enroll_overlap);
  eval->add_option("--collar", ecfg.tcp_collar);
  eval->add_flag("--no-enrollment", no_enrollment);
  eval->add_option("--out", out_dir);

  auto *sweep = app.add_subcommand("sweep", "enrollment-composition sweep");
  sweep->add_option("--checkpoint", checkpoint)->required();
  sweep->add_option("--config", config_path);
  sweep->add_option("--set", overrides);
  sweep->add_option("--samples", ecfg.n_samples);
  sweep->add_option("--seed", ecfg.seed);
  sweep->add_option("--speakers", ecfg.n_speakers);
  sweep->add_option("--overlap", ecfg.overlap);
  sweep->add_option("--out", out_dir);

  auto *score = app.add_subcommand("score", "score metrics from files");
  score->require_subcommand(1);
  auto *tcpwer = score->add_subcommand("tcpwer");
  tcpwer->add_option("--ref", ref_path)->required();
  tcpwer->add_option("--hyp", hyp_path)->required();
  tcpwer->add_option("--collar", collar);
  auto *der = score->add_subcommand("der");
  der->add_option("--ref", ref_path)->required();
  der->add_option("--hyp", hyp_path)->required();
  double der_collar = 0.25;
  der->add_option("--collar", der_collar);
  der->add_option("--frame-rate", frame_rate);
  auto *msce = score->add_subcommand("msce");
  msce->add_option("--ref", ref_path)->required();
  msce->add_option("--hyp", hyp_path)->required();

  auto *check = app.add_subcommand("check-grads", "finite-difference gradient check");
  check->add_option("--coords", coords, "sampled coordinates per parameter tensor");
  check->add_option("--seed", seed);

  if (argc < 2) {
    std::cout << app.help();
    return 2;
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return CmdSynth(config_path, overrides, out_dir, count);
    if (train->parsed()) {
      RunConfig cfg = LoadConfig(config_path, overrides);
      TrainResult r = Train(cfg);
      std::printf("initial loss %.4f, final loss %.4f, checkpoint %s\n", r.initial_loss,
                  r.final_loss, r.checkpoint_path.c_str());
      return 0;
    }
    if (eval->parsed()) {
      ecfg.use_enrollment = !no_enrollment;
      return CmdEval(checkpoint, ecfg, config_path, overrides, out_dir);
    }
    if (sweep->parsed()) return CmdSweep(checkpoint, ecfg, config_path, overrides, out_dir);
    if (tcpwer->parsed()) return CmdScoreTcpwer(ref_path, hyp_path, collar);
    if (der->parsed()) return CmdScoreDer(ref_path, hyp_path, der_collar, frame_rate);
    if (msce->parsed()) return CmdScoreMsce(ref_path, hyp_path);
    if (check->parsed()) return CmdCheckGrads(coords, seed);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
