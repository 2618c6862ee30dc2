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

#ifndef VSHADOW_FEATURES_AUDIO_HPP_
#define VSHADOW_FEATURES_AUDIO_HPP_

#include <filesystem>
#include <vector>

#include "vshadow/common.hpp"

namespace vshadow::features {

struct Waveform {
  std::vector<float> samples;  // [-1, 1]
  int sample_rate_hz = 16000;

  int NumSamples() const { return static_cast<int>(samples.size()); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  void Validate() const;
};

/// Mono 16-bit PCM only. Stereo or float encodings are rejected with an
/// explicit error rather than silently mixed down.
Waveform ReadWav(const std::filesystem::path& path);
void WriteWav(const Waveform& w, const std::filesystem::path& path);

}  // namespace vshadow::features

#endif  // VSHADOW_FEATURES_AUDIO_HPP_
