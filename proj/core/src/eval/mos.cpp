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

#include "vshadow/eval/mos.hpp"

#include <algorithm>
#include <cmath>

namespace vshadow::eval {

double MockMosPredictor::Predict(const features::Waveform& w) const {
  if (w.samples.empty()) return 1.0;
  double energy = 0.0;
  long crossings = 0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double s = w.samples[i];
    energy += s * s;
    if (i > 0 && (s > 0.0) != (w.samples[i - 1] > 0.0)) ++crossings;
  }
  const double rms = std::sqrt(energy / static_cast<double>(w.samples.size()));
  const double zcr =
      static_cast<double>(crossings) / static_cast<double>(w.samples.size());
  const double raw = 1.0 + 12.0 * rms + 4.0 * zcr;
  return std::clamp(raw, 1.0, 5.0);
}

double ExternalMosPredictor::Predict(const features::Waveform& w) const {
  (void)w;
  throw Error("external MOS backend '" + model_ +
              "' is not available in this build");
}

}  // namespace vshadow::eval
