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

#ifndef VSHADOW_COMMON_HPP_
#define VSHADOW_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace vshadow {

/// Base error for all domain failures. CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failures carry the offending line when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
  ParseError(const std::string& msg, int line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = -1;
};

/// FNV-1a, 64 bit. Used for checkpoint fingerprints and nothing
/// security-relevant.
std::uint64_t Fnv1a64(const void* data, std::size_t num_bytes);
std::uint64_t Fnv1a64Extend(std::uint64_t state, const void* data,
                            std::size_t num_bytes);
std::string ToHex(std::uint64_t value);

/// Deterministic RNG. mt19937_64 is fully specified by the standard; the
/// uniform/normal transforms below are spelled out here instead of using
/// std::*_distribution so that sampled streams are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t NextU64() { return gen_(); }

  /// Uniform double in [0, 1).
  double Uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int UniformInt(int lo, int hi);

  /// Standard normal via Box-Muller.
  double Normal();

  /// Derive an independent stream. Mixes the key into the current state.
  Rng Fork(std::uint64_t key);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// log(exp(a) + exp(b)), safe for -inf arguments.
double LogSumExp2(double a, double b);

/// Round half away from zero toward +inf for nonnegative inputs
/// (0.5 -> 1, 1.5 -> 2).
long RoundHalfUp(double x);

}  // namespace vshadow

#endif  // VSHADOW_COMMON_HPP_
