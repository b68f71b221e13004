// Copyright 2026 The datlime Authors.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "datlime/train.hpp"

namespace datlime {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (little-endian): "SNET1", u32 version, input shape, optimizer
// config, u64 seed, u32 layer count, per-layer spec + trainable flag +
// float32 weight and bias blobs, then a CRC-32 of everything before it.
std::vector<std::uint8_t> encode_checkpoint(const TrainedModel& model);
TrainedModel decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model);
/// Throws FormatError (bad magic, truncation), ChecksumError or VersionError.
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace datlime
