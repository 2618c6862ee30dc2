// Copyright (c) 2026 vshadow authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vshadow/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "vshadow/data/feature_io.hpp"

namespace vshadow::data {

namespace {

// Latent geometry. Render channels carry per-partial amplitudes; the
// remaining channels share one large base vector so that every clean frame
// sits in a narrow cosine cone, and a sign flip of the base lands almost
// antipodal to all of them.
constexpr double kSilentBaseNorm = 25.0;
constexpr double kCodewordSilentJitter = 0.3;
constexpr double kFrameWiggle = 0.15;
constexpr double kBreakdownRenderLevel = 0.05;

constexpr double kAmpScale = 0.09;
constexpr double kAmpSharpness = 1.2;
constexpr double kPartialBaseHz = 300.0;
constexpr double kPartialStepHz = 170.0;

// Fork keys. Generation order is part of the on-disk format: reordering
// draws changes every corpus byte.
constexpr std::uint64_t kForkCodebook = 1;
constexpr std::uint64_t kForkUtteranceBase = 1000;
constexpr std::uint64_t kForkStructure = 1;
constexpr std::uint64_t kForkScriptShadow = 2;
constexpr std::uint64_t kForkFirstShadow = 3;
constexpr std::uint64_t kForkLearner = 4;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string UtteranceId(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth_%04d", index);
  return buf;
}

Eigen::MatrixXf MakeCodebook(const SyntheticConfig& config, Rng* rng) {
  const int dim = config.latent_dim;
  const int rows = config.vocab_size + 1;
  Eigen::VectorXd base(dim - kRenderChannels);
  for (int k = 0; k < base.size(); ++k) base[k] = rng->Normal();
  base *= kSilentBaseNorm / base.norm();

  Eigen::MatrixXf codebook(rows, dim);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < kRenderChannels; ++k) {
      const double v = r == config.vocab_size ? kBreakdownRenderLevel
                                              : rng->Normal();
      codebook(r, k) = static_cast<float>(v);
    }
    for (int k = kRenderChannels; k < dim; ++k) {
      codebook(r, k) = static_cast<float>(base[k - kRenderChannels] +
                                          kCodewordSilentJitter * rng->Normal());
    }
  }
  return codebook;
}

// Size-n index subset whose frame count is closest to rate * total_frames.
// Adjacent segments are avoided when possible so that consecutive breakdowns
// never merge into one span.
std::vector<int> ChooseCorrupted(const std::vector<int>& lengths, int n_corrupt,
                                 double target_frames) {
  const int n = static_cast<int>(lengths.size());
  std::vector<int> best;
  double best_err = 0.0;
  bool best_adjacent = true;
  std::vector<int> combo(n_corrupt);
  std::iota(combo.begin(), combo.end(), 0);
  while (true) {
    bool adjacent = false;
    int frames = 0;
    for (int i = 0; i < n_corrupt; ++i) {
      frames += lengths[combo[i]];
      if (i > 0 && combo[i] == combo[i - 1] + 1) adjacent = true;
    }
    const double err = std::abs(frames - target_frames);
    const bool better = best.empty() ||
                        (best_adjacent && !adjacent) ||
                        (best_adjacent == adjacent && err < best_err);
    if (better) {
      best = combo;
      best_err = err;
      best_adjacent = adjacent;
    }
    int i = n_corrupt - 1;
    while (i >= 0 && combo[i] == n - n_corrupt + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < n_corrupt; ++j) combo[j] = combo[j - 1] + 1;
  }
  return best;
}

std::string JoinTokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

void WriteTruth(const SyntheticTruth& truth, const std::filesystem::path& path) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : truth.segments) {
    segs.push_back({{"start", s.start},
                    {"end", s.end},
                    {"token", s.token},
                    {"corrupted", s.corrupted}});
  }
  nlohmann::json j{{"utterance_id", truth.utterance_id}, {"segments", segs}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open truth file for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing truth file: " + path.string());
}

}  // namespace

void SyntheticConfig::Validate() const {
  if (num_triplets < 1) throw Error("num_triplets must be >= 1");
  if (corruption_rate < 0.0 || corruption_rate > 1.0) {
    throw Error("corruption_rate must lie in [0, 1]");
  }
  if (latent_dim <= kRenderChannels) {
    throw Error("latent_dim must exceed the render channel count " +
                std::to_string(kRenderChannels));
  }
  if (vocab_size < 2) throw Error("vocab_size must be >= 2");
  if (min_segments < 1 || max_segments < min_segments) {
    throw Error("need 1 <= min_segments <= max_segments");
  }
  if (min_segment_frames < 1 || max_segment_frames < min_segment_frames) {
    throw Error("need 1 <= min_segment_frames <= max_segment_frames");
  }
  if (breakdown_noise < 0.0) throw Error("breakdown_noise must be >= 0");
  if (sample_rate_hz <= 0 || sample_rate_hz % 50 != 0) {
    throw Error("sample_rate_hz must be a positive multiple of 50");
  }
}

std::string SyntheticTokenName(int index, int vocab_size) {
  if (index < 0 || index > vocab_size) {
    throw Error("token index " + std::to_string(index) +
                " out of range for vocab of " + std::to_string(vocab_size));
  }
  if (index == vocab_size) return "uh";
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%02d", index);
  return buf;
}

features::Waveform RenderLatentFrames(const Eigen::MatrixXf& latents,
                                      int sample_rate_hz) {
  if (latents.rows() < 1) throw Error("cannot render an empty latent sequence");
  if (sample_rate_hz <= 0 || sample_rate_hz % 50 != 0) {
    throw Error("sample_rate_hz must be a positive multiple of 50");
  }
  const int spf = sample_rate_hz / 50;  // 20 ms frames
  const int channels =
      std::min<int>(kRenderChannels, static_cast<int>(latents.cols()));
  features::Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.assign(static_cast<std::size_t>(latents.rows()) * spf, 0.0f);

  std::vector<double> phase(channels, 0.0);
  std::vector<double> step(channels);
  for (int k = 0; k < channels; ++k) {
    const double hz = kPartialBaseHz + kPartialStepHz * k;
    step[k] = 2.0 * M_PI * hz / sample_rate_hz;
  }
  std::size_t s = 0;
  for (int f = 0; f < latents.rows(); ++f) {
    // Partial amplitudes ramp linearly toward the next frame's values so
    // amplitude changes never produce clicks; constant stretches render as
    // exactly stationary combs.
    double amp0[kRenderChannels];
    double amp1[kRenderChannels];
    const int next = f + 1 < latents.rows() ? f + 1 : f;
    for (int k = 0; k < channels; ++k) {
      amp0[k] = kAmpScale * Sigmoid(kAmpSharpness * latents(f, k));
      amp1[k] = kAmpScale * Sigmoid(kAmpSharpness * latents(next, k));
    }
    for (int i = 0; i < spf; ++i, ++s) {
      const double t = static_cast<double>(i) / spf;
      double v = 0.0;
      for (int k = 0; k < channels; ++k) {
        v += (amp0[k] + (amp1[k] - amp0[k]) * t) * std::sin(phase[k]);
        phase[k] += step[k];
      }
      w.samples[s] = static_cast<float>(v);
    }
    // Keep phases bounded over long renders.
    for (int k = 0; k < channels; ++k) {
      phase[k] = std::fmod(phase[k], 2.0 * M_PI);
    }
  }
  return w;
}

SyntheticTruth LoadSyntheticTruth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open truth file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed truth file " + path + ": " + e.what());
  }
  try {
    SyntheticTruth truth;
    truth.utterance_id = j.at("utterance_id").get<std::string>();
    for (const auto& s : j.at("segments")) {
      TruthSegment seg;
      seg.start = s.at("start").get<int>();
      seg.end = s.at("end").get<int>();
      seg.token = s.at("token").get<std::string>();
      seg.corrupted = s.at("corrupted").get<bool>();
      if (seg.start < 0 || seg.end <= seg.start) {
        throw Error("segment range [" + std::to_string(seg.start) + ", " +
                    std::to_string(seg.end) + ") is empty or negative");
      }
      truth.segments.push_back(std::move(seg));
    }
    return truth;
  } catch (const nlohmann::json::exception& e) {
    throw Error("truth file " + path + " missing fields: " + e.what());
  }
}

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticConfig& config,
                                        const std::string& out_dir) {
  config.Validate();
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root / "truth");
  for (const Role role : kAllRoles) {
    fs::create_directories(root / "wav" / RoleName(role));
    fs::create_directories(root / "latents" / RoleName(role));
  }

  Rng rng(config.seed);
  Rng codebook_rng = rng.Fork(kForkCodebook);
  const Eigen::MatrixXf codebook = MakeCodebook(config, &codebook_rng);
  WriteFeatureContainer(
      MakeFeatureSequence(codebook, 20.0, FeatureKind::kOther),
      root / "codebook.vshd");

  const int dim = config.latent_dim;
  const int silent0 = kRenderChannels;
  const Eigen::RowVectorXf breakdown = codebook.row(config.vocab_size);

  Manifest manifest;
  manifest.version = 1;

  for (int idx = 0; idx < config.num_triplets; ++idx) {
    Rng utt_rng = rng.Fork(kForkUtteranceBase + static_cast<std::uint64_t>(idx));
    Rng structure_rng = utt_rng.Fork(kForkStructure);
    Rng ss_rng = utt_rng.Fork(kForkScriptShadow);
    Rng s1_rng = utt_rng.Fork(kForkFirstShadow);
    Rng l2_rng = utt_rng.Fork(kForkLearner);
    const std::string id = UtteranceId(idx);

    const int n_segments =
        structure_rng.UniformInt(config.min_segments, config.max_segments);
    std::vector<int> lengths(n_segments);
    std::vector<int> tokens(n_segments);
    int total_frames = 0;
    for (int s = 0; s < n_segments; ++s) {
      lengths[s] = structure_rng.UniformInt(config.min_segment_frames,
                                            config.max_segment_frames);
      total_frames += lengths[s];
      int tok = structure_rng.UniformInt(0, config.vocab_size - 1);
      while (s > 0 && tok == tokens[s - 1]) {
        tok = structure_rng.UniformInt(0, config.vocab_size - 1);
      }
      tokens[s] = tok;
    }

    const int n_corrupt = std::min<int>(
        n_segments,
        static_cast<int>(RoundHalfUp(config.corruption_rate * n_segments)));
    std::vector<bool> corrupted(n_segments, false);
    if (n_corrupt > 0) {
      for (int s : ChooseCorrupted(lengths, n_corrupt,
                                   config.corruption_rate * total_frames)) {
        corrupted[s] = true;
      }
    }

    // Script-shadow take: codeword plus a per-frame wiggle shared bitwise
    // with the benign first-shadow frames. The wiggle lives on the silent
    // channels only, so rendered segments stay spectrally stationary.
    Eigen::MatrixXf ss(total_frames, dim);
    {
      int f = 0;
      for (int s = 0; s < n_segments; ++s) {
        for (int o = 0; o < lengths[s]; ++o, ++f) {
          for (int k = 0; k < dim; ++k) {
            const float wiggle =
                k < silent0
                    ? 0.0f
                    : static_cast<float>(kFrameWiggle * ss_rng.Normal());
            ss(f, k) = codebook(tokens[s], k) + wiggle;
          }
        }
      }
    }

    // First-shadow take: corrupted segments alternate between the breakdown
    // codeword and its silent-channel mirror. Both render the same
    // low-energy audio; the mirror is near-antipodal to every clean frame.
    Eigen::MatrixXf s1 = ss;
    SyntheticTruth truth;
    truth.utterance_id = id;
    {
      int f = 0;
      for (int s = 0; s < n_segments; ++s) {
        truth.segments.push_back({f, f + lengths[s],
                                  SyntheticTokenName(tokens[s], config.vocab_size),
                                  corrupted[s]});
        for (int o = 0; o < lengths[s]; ++o, ++f) {
          if (!corrupted[s]) continue;
          const float sign = o % 2 == 0 ? 1.0f : -1.0f;
          for (int k = 0; k < dim; ++k) {
            // Render channels take the breakdown codeword verbatim; the
            // jitter sits on the silent channels where it shapes alignment
            // distances without touching the audio.
            if (k < silent0) {
              s1(f, k) = breakdown[k];
            } else {
              s1(f, k) = sign * breakdown[k] +
                         static_cast<float>(config.breakdown_noise *
                                            s1_rng.Normal());
            }
          }
        }
      }
    }

    // Learner take: monotone compressive warp of the script-shadow take with
    // a sinusoidal tempo wobble, then a gain/offset channel perturbation.
    const int lo = static_cast<int>(std::ceil(0.80 * total_frames));
    const int hi = static_cast<int>(std::floor(0.95 * total_frames));
    const int l2_frames = std::max(2, l2_rng.UniformInt(std::min(lo, hi),
                                                        std::max(lo, hi)));
    const double wobble_amp = l2_rng.Uniform(0.3, 1.0);
    const double wobble_freq = l2_rng.Uniform(1.0, 2.0);
    const double gain = l2_rng.Uniform(0.9, 1.1);
    const double offset = l2_rng.Uniform(-0.05, 0.05);
    Eigen::MatrixXf l2(l2_frames, dim);
    for (int i = 0; i < l2_frames; ++i) {
      const double pos = static_cast<double>(i) * total_frames / l2_frames +
                         wobble_amp *
                             std::sin(2.0 * M_PI * wobble_freq * i / l2_frames);
      const int m = static_cast<int>(
          std::clamp<long>(RoundHalfUp(pos), 0, total_frames - 1));
      l2.row(i) = (gain * ss.row(m).cast<double>().array() + offset)
                      .cast<float>()
                      .matrix();
    }

    const struct {
      Role role;
      const Eigen::MatrixXf* latents;
    } takes[] = {{Role::kL2R, &l2},
                 {Role::kL1S1, &s1},
                 {Role::kL1SS, &ss}};

    TripletRecord rec;
    rec.utterance_id = id;
    std::vector<std::string> script_tokens;
    std::vector<std::string> s1_tokens;
    for (int s = 0; s < n_segments; ++s) {
      script_tokens.push_back(SyntheticTokenName(tokens[s], config.vocab_size));
      s1_tokens.push_back(corrupted[s] ? "uh" : script_tokens.back());
    }
    rec.script = JoinTokens(script_tokens);
    rec.transcripts[Role::kL2R] = rec.script;
    rec.transcripts[Role::kL1S1] = JoinTokens(s1_tokens);
    rec.transcripts[Role::kL1SS] = rec.script;
    const int mod = idx % 20;
    rec.split = mod < 14 ? Split::kTrain : mod < 17 ? Split::kDev : Split::kTest;
    rec.sample_rate_hz = config.sample_rate_hz;
    rec.channels = 1;

    for (const auto& take : takes) {
      const std::string role = RoleName(take.role);
      const fs::path wav_path = root / "wav" / role / (id + ".wav");
      const fs::path lat_path = root / "latents" / role / (id + ".vshd");
      features::WriteWav(RenderLatentFrames(*take.latents, config.sample_rate_hz),
                         wav_path);
      WriteFeatureContainer(
          MakeFeatureSequence(*take.latents, 20.0, FeatureKind::kOther),
          lat_path);
      rec.role_paths[take.role] = (fs::path("wav") / role / (id + ".wav")).string();
    }
    WriteTruth(truth, root / "truth" / (id + ".json"));
    manifest.records.push_back(std::move(rec));
  }

  manifest.Validate();
  SaveManifest(manifest, root / "manifest.jsonl");
  return SyntheticCorpus{std::move(manifest), root.string(), codebook};
}

}  // namespace vshadow::data
