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

#ifndef VSHADOW_DATA_FEATURE_IO_HPP_
#define VSHADOW_DATA_FEATURE_IO_HPP_

#include <filesystem>

#include "vshadow/data/feature_sequence.hpp"

namespace vshadow::data {

// Container layout: magic "VSHD1", u32 LE header length, JSON header text
// {"rows","cols","stride_ms","kind"}, then rows*cols float32 LE values in
// row-major order. Round-trips bit-exactly for any finite float32 matrix.

void WriteFeatureContainer(const FeatureSequence& seq,
                           const std::filesystem::path& path);

FeatureSequence ReadFeatureContainer(const std::filesystem::path& path);

}  // namespace vshadow::data

#endif  // VSHADOW_DATA_FEATURE_IO_HPP_
