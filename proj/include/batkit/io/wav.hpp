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

#include "batkit/types.hpp"

namespace batkit::io {

enum class WavFormat { kPcm16, kFloat32 };

struct Wav {
  MultiSignal samples;  // frames x channels
  int sample_rate = 0;
  WavFormat format = WavFormat::kFloat32;

  Eigen::Index channels() const { return samples.cols(); }
  Eigen::Index frames() const { return samples.rows(); }
};

/// Reads 16-bit PCM or 32-bit float WAV (including WAVE_FORMAT_EXTENSIBLE),
/// 1-16 channels. Throws NotFoundError if the file is missing, FormatError on
/// malformed content.
Wav read_wav(const std::filesystem::path& path);

/// Writes interleaved little-endian samples. PCM16 clips to [-1, 1).
void write_wav(const std::filesystem::path& path, const MultiSignal& samples,
               int sample_rate, WavFormat format = WavFormat::kFloat32);

void write_wav(const std::filesystem::path& path, const BinauralPair& pair,
               int sample_rate, WavFormat format = WavFormat::kFloat32);

/// Reads a two-channel file as left/right.
BinauralPair read_binaural(const std::filesystem::path& path);

}  // namespace batkit::io
