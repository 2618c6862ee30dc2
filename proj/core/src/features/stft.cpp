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

#include "vshadow/features/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "vshadow/common.hpp"

namespace vshadow::features {

namespace {

// FFTW plan creation is not thread safe; execution is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

std::vector<double> HannWindow(int n_fft) {
  std::vector<double> w(static_cast<std::size_t>(n_fft));
  for (int n = 0; n < n_fft; ++n) {
    w[static_cast<std::size_t>(n)] =
        0.5 * (1.0 - std::cos(2.0 * M_PI * n / n_fft));
  }
  return w;
}

// Reflect-padded sample lookup; index is relative to the padded signal.
double PaddedSample(const std::vector<float>& x, long padded_index, int pad) {
  long i = padded_index - pad;
  const long n = static_cast<long>(x.size());
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  if (i < 0 || i >= n) return 0.0;
  return x[static_cast<std::size_t>(i)];
}

}  // namespace

Eigen::MatrixXcd ComplexStft(const std::vector<float>& samples, int n_fft,
                             int hop) {
  if (hop <= 0 || n_fft <= 0) throw Error("stft: bad frame parameters");
  if (static_cast<int>(samples.size()) < n_fft) {
    throw Error("waveform shorter than one analysis window (" +
                std::to_string(samples.size()) + " < " +
                std::to_string(n_fft) + " samples)");
  }
  const int pad = n_fft / 2;
  const int num_bins = n_fft / 2 + 1;
  const int num_frames = static_cast<int>(samples.size()) / hop + 1;
  const std::vector<double> window = HannWindow(n_fft);

  Eigen::MatrixXcd spec(num_frames, num_bins);
  std::vector<double> frame(static_cast<std::size_t>(n_fft));
  std::vector<fftw_complex> out(static_cast<std::size_t>(num_bins));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = fftw_plan_dft_r2c_1d(n_fft, frame.data(), out.data(),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("stft: fftw plan failed");

  for (int t = 0; t < num_frames; ++t) {
    const long start = static_cast<long>(t) * hop;
    for (int n = 0; n < n_fft; ++n) {
      frame[static_cast<std::size_t>(n)] =
          PaddedSample(samples, start + n, pad) *
          window[static_cast<std::size_t>(n)];
    }
    fftw_execute(plan);
    for (int k = 0; k < num_bins; ++k) {
      spec(t, k) = std::complex<double>(out[static_cast<std::size_t>(k)][0],
                                        out[static_cast<std::size_t>(k)][1]);
    }
  }
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan);
  }
  return spec;
}

std::vector<float> InverseStft(const Eigen::MatrixXcd& spectrogram, int n_fft,
                               int hop, int num_samples_out) {
  const int num_frames = static_cast<int>(spectrogram.rows());
  const int num_bins = n_fft / 2 + 1;
  if (static_cast<int>(spectrogram.cols()) != num_bins) {
    throw Error("istft: spectrogram bin count mismatch");
  }
  const int pad = n_fft / 2;
  const std::vector<double> window = HannWindow(n_fft);
  const long padded_len = static_cast<long>(num_frames - 1) * hop + n_fft;
  std::vector<double> acc(static_cast<std::size_t>(padded_len), 0.0);
  std::vector<double> norm(static_cast<std::size_t>(padded_len), 0.0);

  std::vector<fftw_complex> in(static_cast<std::size_t>(num_bins));
  std::vector<double> frame(static_cast<std::size_t>(n_fft));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = fftw_plan_dft_c2r_1d(n_fft, in.data(), frame.data(),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("istft: fftw plan failed");

  for (int t = 0; t < num_frames; ++t) {
    for (int k = 0; k < num_bins; ++k) {
      in[static_cast<std::size_t>(k)][0] = spectrogram(t, k).real();
      in[static_cast<std::size_t>(k)][1] = spectrogram(t, k).imag();
    }
    fftw_execute(plan);
    const long start = static_cast<long>(t) * hop;
    for (int n = 0; n < n_fft; ++n) {
      const double w = window[static_cast<std::size_t>(n)];
      // FFTW's c2r is unnormalized; divide by n_fft here.
      acc[static_cast<std::size_t>(start + n)] +=
          w * frame[static_cast<std::size_t>(n)] / n_fft;
      norm[static_cast<std::size_t>(start + n)] += w * w;
    }
  }
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan);
  }

  std::vector<float> out(static_cast<std::size_t>(num_samples_out), 0.0f);
  for (int i = 0; i < num_samples_out; ++i) {
    const long p = static_cast<long>(i) + pad;
    if (p < padded_len && norm[static_cast<std::size_t>(p)] > 1e-9) {
      out[static_cast<std::size_t>(i)] = static_cast<float>(
          acc[static_cast<std::size_t>(p)] / norm[static_cast<std::size_t>(p)]);
    }
  }
  return out;
}

}  // namespace vshadow::features
