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

#ifndef VSHADOW_FEATURES_STFT_HPP_
#define VSHADOW_FEATURES_STFT_HPP_

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace vshadow::features {

// Periodic Hann window of n_fft samples, center reflect padding by n_fft/2.
// Frame t covers padded samples [t*hop, t*hop + n_fft); frame count is
// 1 + floor(num_samples / hop).

Eigen::MatrixXcd ComplexStft(const std::vector<float>& samples, int n_fft,
                             int hop);

/// Overlap-add inverse with squared-window normalization. Returns exactly
/// num_samples_out samples (zero padded if the frame span runs short).
std::vector<float> InverseStft(const Eigen::MatrixXcd& spectrogram, int n_fft,
                               int hop, int num_samples_out);

}  // namespace vshadow::features

#endif  // VSHADOW_FEATURES_STFT_HPP_
