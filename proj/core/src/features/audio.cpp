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

#include "vshadow/features/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace vshadow::features {

void Waveform::Validate() const {
  if (samples.empty()) throw Error("empty waveform");
  if (sample_rate_hz <= 0) throw Error("sample rate must be positive");
  for (float s : samples) {
    if (!std::isfinite(s)) throw Error("waveform has non-finite samples");
  }
}

namespace {

void PutU32(std::vector<unsigned char>& buf, std::uint32_t v) {
  buf.push_back(v & 0xff);
  buf.push_back((v >> 8) & 0xff);
  buf.push_back((v >> 16) & 0xff);
  buf.push_back((v >> 24) & 0xff);
}

void PutU16(std::vector<unsigned char>& buf, std::uint16_t v) {
  buf.push_back(v & 0xff);
  buf.push_back((v >> 8) & 0xff);
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t GetU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open wav file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error("not a RIFF/WAVE file: " + path.string());
  }

  Waveform w;
  std::size_t pos = 12;
  bool have_fmt = false;
  int channels = 0;
  int bits = 0;
  while (pos + 8 <= bytes.size()) {
    const char* chunk_id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_size = GetU32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw Error("truncated wav chunk: " + path.string());
    }
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw Error("bad fmt chunk: " + path.string());
      const std::uint16_t format = GetU16(bytes.data() + body);
      channels = GetU16(bytes.data() + body + 2);
      w.sample_rate_hz = static_cast<int>(GetU32(bytes.data() + body + 4));
      bits = GetU16(bytes.data() + body + 14);
      if (format != 1) {
        throw Error("unsupported wav encoding (expect PCM): " + path.string());
      }
      if (channels != 1) {
        throw Error("unsupported channel count " + std::to_string(channels) +
                    " (mono only): " + path.string());
      }
      if (bits != 16) {
        throw Error("unsupported bit depth " + std::to_string(bits) +
                    " (16-bit only): " + path.string());
      }
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      if (!have_fmt) throw Error("wav data before fmt: " + path.string());
      const std::size_t count = chunk_size / 2;
      w.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::int16_t s = static_cast<std::int16_t>(
            GetU16(bytes.data() + body + 2 * i));
        w.samples[i] = static_cast<float>(s) / 32768.0f;
      }
      w.Validate();
      return w;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  throw Error("wav file has no data chunk: " + path.string());
}

void WriteWav(const Waveform& w, const std::filesystem::path& path) {
  w.Validate();
  std::vector<unsigned char> buf;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(w.samples.size() * 2);
  buf.reserve(44 + data_bytes);
  buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
  PutU32(buf, 36 + data_bytes);
  buf.insert(buf.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(buf, 16);
  PutU16(buf, 1);  // PCM
  PutU16(buf, 1);  // mono
  PutU32(buf, static_cast<std::uint32_t>(w.sample_rate_hz));
  PutU32(buf, static_cast<std::uint32_t>(w.sample_rate_hz * 2));
  PutU16(buf, 2);
  PutU16(buf, 16);
  buf.insert(buf.end(), {'d', 'a', 't', 'a'});
  PutU32(buf, data_bytes);
  for (float s : w.samples) {
    const float clamped = std::clamp(s, -1.0f, 1.0f);
    const auto q = static_cast<std::int16_t>(
        std::lrint(clamped * 32767.0f));
    PutU16(buf, static_cast<std::uint16_t>(q));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace vshadow::features
