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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "vshadow/common.hpp"
#include "vshadow/features/audio.hpp"
#include "vshadow/features/embedder.hpp"
#include "vshadow/features/mel.hpp"
#include "vshadow/features/stft.hpp"

namespace vshadow::features {
namespace {

namespace fs = std::filesystem;

Waveform Tone(double freq_hz, double amplitude, double seconds,
              int sample_rate_hz = 16000) {
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  const int n = static_cast<int>(seconds * sample_rate_hz);
  w.samples.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    w.samples[static_cast<std::size_t>(t)] = static_cast<float>(
        amplitude * std::sin(2.0 * M_PI * freq_hz * t / sample_rate_hz));
  }
  return w;
}

Waveform Silence(double seconds, int sample_rate_hz = 16000) {
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.assign(static_cast<std::size_t>(seconds * sample_rate_hz), 0.0f);
  return w;
}

TEST_CASE("wav io round-trips within 16-bit quantization") {
  const fs::path path = fs::temp_directory_path() / "vshadow_test_tone.wav";
  const Waveform w = Tone(440.0, 0.5, 0.1);
  WriteWav(w, path);
  const Waveform back = ReadWav(path);
  REQUIRE(back.NumSamples() == w.NumSamples());
  CHECK(back.sample_rate_hz == w.sample_rate_hz);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(std::abs(back.samples[i] - w.samples[i]) < 5e-5f);
  }
  fs::remove(path);
}

TEST_CASE("waveform validation") {
  Waveform w;
  CHECK_THROWS_AS(w.Validate(), Error);
  w.samples = {0.0f, 1.0f};
  w.sample_rate_hz = 0;
  CHECK_THROWS_AS(w.Validate(), Error);
  w.sample_rate_hz = 16000;
  CHECK_NOTHROW(w.Validate());
  w.samples[1] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(w.Validate(), Error);
}

TEST_CASE("stft frame and bin counts") {
  const Waveform w = Silence(1.0);
  const Eigen::MatrixXcd spec = ComplexStft(w.samples, 1024, 320);
  CHECK(spec.rows() == 51);
  CHECK(spec.cols() == 513);
}

TEST_CASE("stft rejects sub-window input") {
  std::vector<float> x(500, 0.0f);
  try {
    ComplexStft(x, 1024, 320);
    FAIL("expected short-input error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("500") != std::string::npos);
    CHECK(msg.find("1024") != std::string::npos);
  }
}

TEST_CASE("mel of silence sits on the log floor everywhere") {
  const MelConfig config;
  const data::FeatureSequence mel = ExtractMel(Silence(1.0), config);
  CHECK(mel.Frames() == 51);
  CHECK(mel.Dim() == 80);
  const float floor = static_cast<float>(config.LogFloor());
  CHECK((mel.data.array() == floor).all());
}

TEST_CASE("one second of audio maps to 51 frames at the 20 ms stride") {
  const data::FeatureSequence mel = ExtractMel(Tone(300.0, 0.3, 1.0),
                                               MelConfig{});
  CHECK(mel.Frames() == 51);
  CHECK(std::abs(mel.Frames() - 50) <= 1);
  CHECK(mel.stride_ms == 20.0);
}

// Frozen from an independent spectral analysis of the same filterbank
// contract: a 440 Hz tone peaks in mel channel 15 (centre near 452 Hz)
// on every interior frame, with the runner-up 0.65 log units below.
TEST_CASE("pure tone concentrates energy in one mel channel") {
  const data::FeatureSequence mel = ExtractMel(Tone(440.0, 0.5, 1.0),
                                               MelConfig{});
  REQUIRE(mel.Frames() == 51);
  for (int t = 5; t < mel.Frames() - 5; ++t) {
    int argmax = 0;
    mel.data.row(t).maxCoeff(&argmax);
    CHECK(argmax == 15);
  }
}

TEST_CASE("pseudo embedding is the seeded projection of the mel front end") {
  const Waveform w = Tone(500.0, 0.4, 0.5);
  const data::FeatureSequence emb = PseudoEmbed(w, 64, 31);

  const MelConfig mel_config;
  const data::FeatureSequence mel = ExtractMel(w, mel_config);
  const Eigen::MatrixXf shifted =
      mel.data.array() - static_cast<float>(mel_config.LogFloor());
  const Eigen::MatrixXf expected = PseudoProjectRows(shifted, 64, 31);

  CHECK(emb.data == expected);
  CHECK(emb.Frames() == mel.Frames());
  CHECK(emb.stride_ms == mel.stride_ms);
}

TEST_CASE("pseudo embedding is deterministic and seed-sensitive") {
  const Waveform w = Tone(500.0, 0.4, 0.5);
  const data::FeatureSequence a = PseudoEmbed(w, 32, 7);
  const data::FeatureSequence b = PseudoEmbed(w, 32, 7);
  const data::FeatureSequence c = PseudoEmbed(w, 32, 8);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
}

TEST_CASE("default registry produces the contract dims") {
  const EmbedderRegistry reg = EmbedderRegistry::Default();
  const Waveform five_seconds = Tone(220.0, 0.3, 5.0);

  const data::FeatureSequence s3r =
      reg.Embed(five_seconds, data::FeatureKind::kS3r);
  CHECK(s3r.Frames() == 251);
  CHECK(std::abs(s3r.Frames() - 250) <= 1);
  CHECK(s3r.Dim() == 768);
  CHECK(s3r.kind == data::FeatureKind::kS3r);

  const data::FeatureSequence ppg =
      reg.Embed(five_seconds, data::FeatureKind::kPpgBnf);
  CHECK(ppg.Dim() == 144);
  CHECK(ppg.Frames() == s3r.Frames());

  const data::FeatureSequence mel =
      reg.Embed(five_seconds, data::FeatureKind::kMel);
  CHECK(mel.Dim() == 80);
  CHECK(mel.Frames() == s3r.Frames());
}

TEST_CASE("registry config validation") {
  CHECK_THROWS_AS(EmbedderRegistry::FromJsonText("not json"), Error);
  CHECK_THROWS_AS(EmbedderRegistry::FromJsonText("[1,2]"), Error);
  CHECK_THROWS_AS(EmbedderRegistry::FromJsonText(
                      R"({"mel": {"backend": "quantum"}})"),
                  Error);
  CHECK_THROWS_AS(EmbedderRegistry::FromJsonText(
                      R"({"ppg_bnf": {"backend": "mel"}})"),
                  Error);
  CHECK_THROWS_AS(EmbedderRegistry::FromJsonText(
                      R"({"s3r": {"backend": "external"}})"),
                  Error);
  CHECK_THROWS_AS(EmbedderRegistry::FromJsonText(
                      R"({"ppg_bnf": {"backend": "pseudo", "dim": 10}})"),
                  Error);
  CHECK_NOTHROW(EmbedderRegistry::FromJsonText(
      R"({"ppg_bnf": {"backend": "pseudo", "seed": 101}})"));
}

TEST_CASE("registry reports unregistered kinds and unavailable backends") {
  const EmbedderRegistry empty = EmbedderRegistry::FromJsonText(
      R"({"mel": {"backend": "mel"}})");
  try {
    empty.BackendFor(data::FeatureKind::kS3r);
    FAIL("expected missing-backend error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("s3r") != std::string::npos);
  }

  const EmbedderRegistry ext = EmbedderRegistry::FromJsonText(
      R"({"s3r": {"backend": "external", "model": "wavlm-large"}})");
  try {
    ext.Embed(Tone(220.0, 0.3, 0.5), data::FeatureKind::kS3r);
    FAIL("expected external-backend error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("wavlm-large") != std::string::npos);
  }
}

TEST_CASE("registry seeds split backends apart") {
  const EmbedderRegistry reg = EmbedderRegistry::Default();
  const Waveform w = Tone(330.0, 0.3, 0.5);
  const data::FeatureSequence a = reg.Embed(w, data::FeatureKind::kPpgBnf);
  const data::FeatureSequence b = reg.Embed(w, data::FeatureKind::kPpgBnf);
  CHECK(a.data == b.data);
  const data::FeatureSequence s = reg.Embed(w, data::FeatureKind::kS3r);
  CHECK(a.data.leftCols(10) != s.data.leftCols(10));
}

}  // namespace
}  // namespace vshadow::features
