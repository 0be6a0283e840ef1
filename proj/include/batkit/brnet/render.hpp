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
#include "batkit/dsp/erb.hpp"
#include "batkit/scene/geometry.hpp"
#include "batkit/types.hpp"

namespace batkit::brnet {

/// Renders binaural output from mic signals (samples x M, geometry channel
/// order): STFT, SCORE features, forward pass at alpha, mask and deep filter
/// on the reference channel, inverse STFT per ear. The output is as long as
/// the input; trailing samples no frame covers are zero.
BinauralPair render(const ModelParams<float>& params, const MultiSignal& mics,
                    const scene::ArrayGeometry& geometry, double alpha);

BinauralPair render(const std::filesystem::path& checkpoint, const MultiSignal& mics,
                    const scene::ArrayGeometry& geometry, double alpha);

}  // namespace batkit::brnet
