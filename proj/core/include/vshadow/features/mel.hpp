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

#ifndef VSHADOW_FEATURES_MEL_HPP_
#define VSHADOW_FEATURES_MEL_HPP_

#include <Eigen/Core>

#include "vshadow/data/feature_sequence.hpp"
#include "vshadow/features/audio.hpp"

namespace vshadow::features {

/// Analysis parameters pinned in one place. 80 bins on a 20 ms stride; the
/// remaining values (FFT size, Hann window of n_fft, center reflect padding,
/// natural-log compression with a 1e-10 power floor, HTK mel scale spanning
/// 0..Nyquist) are fixed here and relied on by the tests.
struct MelConfig {
  int num_mels = 80;
  double stride_ms = 20.0;
  int n_fft = 1024;
  double power_floor = 1e-10;

  int HopSamples(int sample_rate_hz) const;
  double LogFloor() const;  // log(power_floor)
};

/// Triangular mel filterbank, shape (num_mels x (n_fft/2 + 1)).
Eigen::MatrixXd MelFilterbank(const MelConfig& config, int sample_rate_hz);

/// Log mel spectrogram, frame count 1 + floor(num_samples / hop).
/// Throws when the waveform is shorter than one analysis window (n_fft).
data::FeatureSequence ExtractMel(const Waveform& w,
                                 const MelConfig& config = MelConfig());

/// Magnitude STFT, shape (frames x (n_fft/2 + 1)). Shared by mel analysis
/// and the phase-reconstruction vocoder.
Eigen::MatrixXd MagnitudeStft(const Waveform& w, const MelConfig& config);

}  // namespace vshadow::features

#endif  // VSHADOW_FEATURES_MEL_HPP_
