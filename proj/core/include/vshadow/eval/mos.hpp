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
// Naturalness score adapter. The mock backend is a deterministic bounded
// function of signal statistics; real predictors plug in behind the same
// interface.

#ifndef VSHADOW_EVAL_MOS_HPP_
#define VSHADOW_EVAL_MOS_HPP_

#include <string>

#include "vshadow/features/audio.hpp"

namespace vshadow::eval {

class MosPredictor {
 public:
  virtual ~MosPredictor() = default;

  virtual std::string BackendId() const = 0;

  /// Score in [1, 5].
  virtual double Predict(const features::Waveform& w) const = 0;
};

/// Blends RMS level and zero-crossing rate into a clamped score. Silence
/// scores 1.0; any input lands in [1, 5].
class MockMosPredictor : public MosPredictor {
 public:
  std::string BackendId() const override { return "mock"; }
  double Predict(const features::Waveform& w) const override;
};

/// Placeholder for a real predictor checkpoint; always throws.
class ExternalMosPredictor : public MosPredictor {
 public:
  explicit ExternalMosPredictor(std::string model) : model_(std::move(model)) {}

  std::string BackendId() const override { return "external"; }
  double Predict(const features::Waveform& w) const override;

 private:
  std::string model_;
};

}  // namespace vshadow::eval

#endif  // VSHADOW_EVAL_MOS_HPP_
