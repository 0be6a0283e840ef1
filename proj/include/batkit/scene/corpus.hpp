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

#include <cstdint>
#include <string>

#include "batkit/types.hpp"

namespace batkit::scene {

/// Speech-like signal: a glottal pulse train with drifting pitch, shaped by
/// three formant resonators that move per syllable, with pauses. RMS 0.1.
Signal speech_like(std::uint64_t seed, Eigen::Index samples, double sample_rate = kSampleRate);

/// Music-like signal: a sequence of harmonic chords with percussive
/// envelopes. RMS 0.1.
Signal music_like(std::uint64_t seed, Eigen::Index samples, double sample_rate = kSampleRate);

/// Resolves source identifiers:
///   "speech:<n>"  bundled speech-like signal number n
///   "music:<n>"   bundled music-like signal number n
///   "wav:<path>"  first channel of a 16 kHz WAV file
/// Throws NotFoundError for unknown ids or missing files and
/// std::invalid_argument when a file is shorter than requested.
Signal resolve_signal(const std::string& signal_id, Eigen::Index samples,
                      double sample_rate = kSampleRate);

}  // namespace batkit::scene
