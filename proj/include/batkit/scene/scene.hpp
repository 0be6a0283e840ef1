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
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "batkit/scene/geometry.hpp"
#include "batkit/scene/hrir.hpp"
#include "batkit/scene/rir.hpp"
#include "batkit/types.hpp"

namespace batkit::scene {

/// Source placed on the horizontal plane through the array centre. Azimuth
/// is relative to the array's 0-degree axis.
struct SourceSpec {
  double azimuth = 0.0;   // degrees
  double distance = 1.5;  // metres
  std::string signal_id;
};

struct SceneSpec {
  RoomSpec room;
  std::vector<SourceSpec> speakers;
  std::vector<SourceSpec> interferers;
  double sir = 10.0;  // dB
  double snr = 25.0;  // dB
  double alpha = 1.0;
  std::uint64_t seed = 0;
  double duration = 5.0;  // seconds

  /// Throws std::invalid_argument on violated invariants (alpha range,
  /// speaker count, 30-degree source separation).
  void validate() const;
};

nlohmann::json scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const nlohmann::json& j);

inline constexpr double kMinSeparationDeg = 30.0;
inline constexpr double kEarlyMs = 20.0;
inline constexpr double kCleanT60 = 0.2;
/// Per-speaker power of the reverberant image at the reference mic.
inline constexpr double kSpeakerPower = 2.5e-3;

double azimuth_gap(double a_deg, double b_deg);

/// World-frame positions of the array mics and of a source.
std::vector<Eigen::Vector3d> mic_world_positions(const RoomSpec& room,
                                                 const ArrayGeometry& geometry);
Eigen::Vector3d source_world_position(const RoomSpec& room, const SourceSpec& source);

struct SceneMix {
  MultiSignal mics;        // samples x M
  BinauralPair clean;      // speech term of the target
  BinauralPair ambience;   // late speech reverberation plus interferers
  BinauralPair target;     // clean + alpha * ambience

  // Reference-mic stems, kept for level checks.
  Signal speech_ref;
  Signal interferer_ref;
  Signal noise_ref;
};

/// Renders the microphone mixture and the binaural target of one scene.
/// Speakers are equalized to kSpeakerPower at the reference mic, interferers
/// scaled to the requested SIR there, and white Gaussian sensor noise (seeded
/// by spec.seed) scaled to the requested SNR against the noise-free
/// reference-mic signal.
SceneMix mix_scene(const SceneSpec& spec, const ArrayGeometry& geometry, const HrirSet& hrirs);

/// Blends target = clean + alpha * ambience.
BinauralPair blend_target(const BinauralPair& clean, const BinauralPair& ambience, double alpha);

struct SceneRanges {
  double azimuth_min = -90.0;
  double azimuth_max = 90.0;
  double distance_min = 1.0;
  double distance_max = 2.0;
  Eigen::Vector3d room_min{5.0, 4.0, 2.7};
  Eigen::Vector3d room_max{8.0, 6.0, 3.5};
  double center_jitter = 0.5;  // metres around the room centre, horizontal
  double array_height = 1.5;
  std::vector<double> t60_choices{0.3, 0.4, 0.5, 0.6};
  std::vector<double> sir_choices{5.0, 10.0, 15.0};
  std::vector<double> snr_choices{20.0, 25.0, 30.0};
  std::vector<double> alpha_choices{0.0, 0.3, 0.5, 0.7, 1.0};
  int speakers = 2;
  int interferers = 1;
  int speech_pool = 40;
  int music_pool = 20;
  double duration = 5.0;
  double wall_margin = 0.3;
};

/// Draws a scene deterministically from `seed`, rejection-sampling source
/// placements until every pair is at least 30 degrees apart and inside the
/// room. Throws std::invalid_argument after 10,000 rejected draws.
SceneSpec sample_scene(std::uint64_t seed, const SceneRanges& ranges = {});

}  // namespace batkit::scene
