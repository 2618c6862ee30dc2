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

#include "vshadow/data/feature_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace vshadow::data {

namespace {

constexpr char kMagic[5] = {'V', 'S', 'H', 'D', '1'};

void WriteU32Le(std::ostream& out, std::uint32_t value) {
  unsigned char bytes[4] = {
      static_cast<unsigned char>(value & 0xff),
      static_cast<unsigned char>((value >> 8) & 0xff),
      static_cast<unsigned char>((value >> 16) & 0xff),
      static_cast<unsigned char>((value >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t ReadU32Le(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw Error("feature container: truncated header length");
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

static_assert(sizeof(float) == 4, "float32 payload requires 4-byte float");

}  // namespace

void WriteFeatureContainer(const FeatureSequence& seq,
                           const std::filesystem::path& path) {
  seq.Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());

  nlohmann::json header;
  header["rows"] = seq.Frames();
  header["cols"] = seq.Dim();
  header["stride_ms"] = seq.stride_ms;
  header["kind"] = FeatureKindName(seq.kind);
  const std::string header_text = header.dump();

  out.write(kMagic, sizeof(kMagic));
  WriteU32Le(out, static_cast<std::uint32_t>(header_text.size()));
  out.write(header_text.data(),
            static_cast<std::streamsize>(header_text.size()));

  // Row-major float32 LE payload. Assumes a little-endian host, like every
  // platform this project targets.
  std::vector<float> row(static_cast<std::size_t>(seq.Dim()));
  for (int r = 0; r < seq.Frames(); ++r) {
    for (int c = 0; c < seq.Dim(); ++c) row[static_cast<std::size_t>(c)] = seq.data(r, c);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw Error("write failed: " + path.string());
}

FeatureSequence ReadFeatureContainer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature container: " + path.string());

  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("corrupt feature container (bad magic): " + path.string());
  }

  const std::uint32_t header_len = ReadU32Le(in);
  if (header_len == 0 || header_len > (1u << 20)) {
    throw Error("corrupt feature container (header length): " + path.string());
  }
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (!in) throw Error("corrupt feature container (truncated header): " +
                       path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt feature container header: " + std::string(e.what()));
  }

  FeatureSequence seq;
  try {
    const auto rows = header.at("rows").get<std::int64_t>();
    const auto cols = header.at("cols").get<std::int64_t>();
    seq.stride_ms = header.at("stride_ms").get<double>();
    seq.kind = FeatureKindFromName(header.at("kind").get<std::string>());
    if (rows < 1 || cols < 1 || rows * cols > (1ll << 32)) {
      throw Error("corrupt feature container (shape)");
    }
    seq.data.resize(rows, cols);
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt feature container header: " + std::string(e.what()));
  }

  std::vector<float> row(static_cast<std::size_t>(seq.Dim()));
  for (int r = 0; r < seq.Frames(); ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) {
      throw Error("feature container payload size mismatch: " + path.string());
    }
    for (int c = 0; c < seq.Dim(); ++c) seq.data(r, c) = row[static_cast<std::size_t>(c)];
  }
  // Exactly rows*cols values expected.
  char extra;
  if (in.read(&extra, 1)) {
    throw Error("feature container payload size mismatch: " + path.string());
  }
  seq.Validate();
  return seq;
}

}  // namespace vshadow::data
