// Copyright 2026 The batkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>

#include "batkit/score/score.hpp"

namespace batkit::score {

/// Feature dump: "SCRF", u16 version, u32 frames, u32 bands, u32 looks, then
/// little-endian float32 score (frames x bands x looks, row-major) followed
/// by ref_logspec (frames x bands).
inline constexpr std::uint16_t kScrfVersion = 1;

void write_scrf(const std::filesystem::path& path, const ScoreFeature& feat);
ScoreFeature read_scrf(const std::filesystem::path& path);

}  // namespace batkit::score
