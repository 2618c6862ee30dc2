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

#include "vshadow/synth/vocoder.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Cholesky>

#include "vshadow/features/mel.hpp"
#include "vshadow/features/stft.hpp"

namespace vshadow::synth {

GriffinLimVocoder::GriffinLimVocoder(const GriffinLimConfig& config)
    : config_(config) {
  if (config.iterations < 1) throw Error("iterations must be >= 1");
  if (config.sample_rate_hz <= 0) throw Error("sample rate must be positive");
}

features::Waveform GriffinLimVocoder::Vocode(
    const data::FeatureSequence& mel) const {
  const features::MelConfig analysis;
  if (mel.kind != data::FeatureKind::kMel ||
      mel.Dim() != analysis.num_mels) {
    throw Error("vocoder backend 'fallback' failed: expected " +
                std::to_string(analysis.num_mels) + "-bin mel input, got " +
                data::FeatureKindName(mel.kind) + " of dim " +
                std::to_string(mel.Dim()));
  }
  if (std::abs(mel.stride_ms - analysis.stride_ms) > 1e-9) {
    throw Error("vocoder backend 'fallback' failed: stride " +
                std::to_string(mel.stride_ms) + " ms, expected " +
                std::to_string(analysis.stride_ms));
  }
  const int frames = mel.Frames();
  const int hop = analysis.HopSamples(config_.sample_rate_hz);
  const int n_fft = analysis.n_fft;
  const int num_samples = frames * hop;

  // Least-squares spectral power from mel power via the filterbank Gram
  // matrix, clamped to physical nonnegativity.
  const Eigen::MatrixXd fb =
      features::MelFilterbank(analysis, config_.sample_rate_hz);
  const Eigen::MatrixXd gram = fb * fb.transpose();
  const Eigen::MatrixXd pinv_rows = gram.ldlt().solve(fb);  // 80 x bins
  const Eigen::MatrixXd mel_power = mel.data.cast<double>().array().exp();
  const Eigen::MatrixXd magnitude =
      (mel_power * pinv_rows).cwiseMax(0.0).cwiseSqrt();

  Rng rng(config_.seed);
  Eigen::MatrixXcd spec(frames, magnitude.cols());
  for (int f = 0; f < frames; ++f) {
    for (int b = 0; b < magnitude.cols(); ++b) {
      const double phi = rng.Uniform(0.0, 2.0 * M_PI);
      spec(f, b) = std::polar(magnitude(f, b), phi);
    }
  }

  std::vector<float> wav;
  for (int it = 0; it < config_.iterations; ++it) {
    wav = features::InverseStft(spec, n_fft, hop, num_samples);
    // Re-analysis yields one frame more than synthesized; the surplus tail
    // frame is dropped before the magnitude snap.
    const Eigen::MatrixXcd reanalysis =
        features::ComplexStft(wav, n_fft, hop).topRows(frames);
    for (int f = 0; f < frames; ++f) {
      for (int b = 0; b < spec.cols(); ++b) {
        const std::complex<double> v = reanalysis(f, b);
        const double len = std::abs(v);
        spec(f, b) = len > 0.0 ? magnitude(f, b) * (v / len)
                               : std::complex<double>(magnitude(f, b), 0.0);
      }
    }
  }
  wav = features::InverseStft(spec, n_fft, hop, num_samples);

  features::Waveform out;
  out.sample_rate_hz = config_.sample_rate_hz;
  out.samples = std::move(wav);
  return out;
}

features::Waveform ExternalVocoder::Vocode(
    const data::FeatureSequence& mel) const {
  (void)mel;
  throw Error("vocoder backend '" + backend_id_ +
              "' failed: no external checkpoint is available in this build");
}

std::unique_ptr<Vocoder> MakeVocoder(const std::string& backend_id,
                                     const GriffinLimConfig& fallback_config) {
  if (backend_id == "fallback") {
    return std::make_unique<GriffinLimVocoder>(fallback_config);
  }
  return std::make_unique<ExternalVocoder>(backend_id);
}

}  // namespace vshadow::synth
