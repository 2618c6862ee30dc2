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

#include "vshadow/features/mel.hpp"

#include <cmath>

#include "vshadow/features/stft.hpp"

namespace vshadow::features {

namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

}  // namespace

int MelConfig::HopSamples(int sample_rate_hz) const {
  const int hop =
      static_cast<int>(RoundHalfUp(stride_ms * sample_rate_hz / 1000.0));
  if (hop <= 0) throw Error("mel: hop rounds to zero samples");
  return hop;
}

double MelConfig::LogFloor() const { return std::log(power_floor); }

Eigen::MatrixXd MelFilterbank(const MelConfig& config, int sample_rate_hz) {
  const int num_bins = config.n_fft / 2 + 1;
  const double nyquist = sample_rate_hz / 2.0;
  const double mel_max = HzToMel(nyquist);

  std::vector<double> hz_points(static_cast<std::size_t>(config.num_mels + 2));
  for (int m = 0; m < config.num_mels + 2; ++m) {
    hz_points[static_cast<std::size_t>(m)] =
        MelToHz(mel_max * m / (config.num_mels + 1));
  }

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(config.num_mels, num_bins);
  for (int m = 0; m < config.num_mels; ++m) {
    const double lo = hz_points[static_cast<std::size_t>(m)];
    const double center = hz_points[static_cast<std::size_t>(m + 1)];
    const double hi = hz_points[static_cast<std::size_t>(m + 2)];
    for (int k = 0; k < num_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / config.n_fft;
      double w = 0.0;
      if (f >= lo && f <= center && center > lo) {
        w = (f - lo) / (center - lo);
      } else if (f > center && f <= hi && hi > center) {
        w = (hi - f) / (hi - center);
      }
      fb(m, k) = w;
    }
  }
  return fb;
}

Eigen::MatrixXd MagnitudeStft(const Waveform& w, const MelConfig& config) {
  w.Validate();
  const int hop = config.HopSamples(w.sample_rate_hz);
  return ComplexStft(w.samples, config.n_fft, hop).cwiseAbs();
}

data::FeatureSequence ExtractMel(const Waveform& w, const MelConfig& config) {
  const Eigen::MatrixXd mag = MagnitudeStft(w, config);
  const Eigen::MatrixXd fb = MelFilterbank(config, w.sample_rate_hz);
  // frames x mels = (frames x bins) * (bins x mels)
  const Eigen::MatrixXd mel_power =
      (mag.array().square().matrix() * fb.transpose())
          .cwiseMax(config.power_floor);
  const Eigen::MatrixXf log_mel =
      mel_power.array().log().matrix().cast<float>();
  return data::MakeFeatureSequence(log_mel, config.stride_ms,
                                   data::FeatureKind::kMel);
}

}  // namespace vshadow::features
