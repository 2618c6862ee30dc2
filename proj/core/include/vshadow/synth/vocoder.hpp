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
//
// Mel to waveform. The fallback backend reconstructs phase iteratively from
// a pseudo-inverse mel filterbank; neural vocoders plug in as adapters.

#ifndef VSHADOW_SYNTH_VOCODER_HPP_
#define VSHADOW_SYNTH_VOCODER_HPP_

#include <cstdint>
#include <memory>
#include <string>

#include "vshadow/data/feature_sequence.hpp"
#include "vshadow/features/audio.hpp"

namespace vshadow::synth {

struct GriffinLimConfig {
  int iterations = 32;
  std::uint64_t seed = 9001;
  int sample_rate_hz = 16000;
};

class Vocoder {
 public:
  virtual ~Vocoder() = default;

  virtual std::string BackendId() const = 0;

  /// 80-bin log mel on a 20 ms stride in, waveform of exactly
  /// num_frames * hop samples out.
  virtual features::Waveform Vocode(const data::FeatureSequence& mel) const = 0;
};

/// Deterministic: fixed iteration count, seeded initial phase.
class GriffinLimVocoder : public Vocoder {
 public:
  explicit GriffinLimVocoder(const GriffinLimConfig& config = GriffinLimConfig());

  std::string BackendId() const override { return "fallback"; }
  features::Waveform Vocode(const data::FeatureSequence& mel) const override;

 private:
  GriffinLimConfig config_;
};

/// Placeholder for a neural vocoder checkpoint; always throws.
class ExternalVocoder : public Vocoder {
 public:
  explicit ExternalVocoder(std::string backend_id)
      : backend_id_(std::move(backend_id)) {}

  std::string BackendId() const override { return backend_id_; }
  features::Waveform Vocode(const data::FeatureSequence& mel) const override;

 private:
  std::string backend_id_;
};

/// "fallback" builds the phase-reconstruction backend; any other id becomes
/// an external adapter that reports itself unavailable when used.
std::unique_ptr<Vocoder> MakeVocoder(const std::string& backend_id,
                                     const GriffinLimConfig& fallback_config =
                                         GriffinLimConfig());

}  // namespace vshadow::synth

#endif  // VSHADOW_SYNTH_VOCODER_HPP_
