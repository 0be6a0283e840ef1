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

#include "batkit/brnet/params.hpp"

namespace batkit::brnet {

/// Binary checkpoint: "BRN1", u16 version, u32 H, B, Q, N, F_df, then until
/// end of file entries of (u16 name length, name, u8 rank, u32 dims[rank],
/// float32 data, row-major). All integers little-endian.
void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params);

/// Throws NotFoundError for a missing file and FormatError for anything
/// malformed, including missing, duplicate or mis-shaped tensors.
ModelParams<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace batkit::brnet
