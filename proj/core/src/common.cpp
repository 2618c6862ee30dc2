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

#include "vshadow/common.hpp"

#include <cmath>
#include <cstdio>

namespace vshadow {

namespace {
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;
}  // namespace

std::uint64_t Fnv1a64Extend(std::uint64_t state, const void* data,
                            std::size_t num_bytes) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < num_bytes; ++i) {
    state ^= bytes[i];
    state *= kFnvPrime;
  }
  return state;
}

std::uint64_t Fnv1a64(const void* data, std::size_t num_bytes) {
  return Fnv1a64Extend(kFnvOffset, data, num_bytes);
}

std::string ToHex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

int Rng::UniformInt(int lo, int hi) {
  if (hi < lo) throw Error("UniformInt: hi < lo");
  const auto span = static_cast<std::uint64_t>(hi) - lo + 1;
  // Modulo bias is irrelevant for the corpus-generation span sizes used here.
  return lo + static_cast<int>(gen_() % span);
}

double Rng::Normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = Uniform();
  } while (u1 <= 0.0);
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Rng Rng::Fork(std::uint64_t key) {
  std::uint64_t mixed = gen_();
  mixed ^= key + 0x9e3779b97f4a7c15ull + (mixed << 6) + (mixed >> 2);
  return Rng(mixed);
}

double LogSumExp2(double a, double b) {
  if (std::isinf(a) && a < 0.0) return b;
  if (std::isinf(b) && b < 0.0) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

long RoundHalfUp(double x) { return static_cast<long>(std::floor(x + 0.5)); }

}  // namespace vshadow
