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
#include <map>

#include <Eigen/Core>

#include "batkit/types.hpp"

namespace batkit::scene {

struct HrirPair {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
};

/// Head-related impulse responses keyed by azimuth in degrees, [0, 360).
/// Azimuth grows counter-clockwise seen from above: 90 is the left side.
struct HrirSet {
  std::map<double, HrirPair> entries;
  double sample_rate = kSampleRate;

  /// Entry with the smallest circular azimuth distance.
  const HrirPair& nearest(double azimuth_deg) const;
};

struct SphericalHead {
  double radius = 0.0875;
  double sound_speed = kSoundSpeed;
  double sample_rate = kSampleRate;
  int length = 128;
  double base_delay = 8.0;     // samples, keeps the sinc interpolator causal
  double shadow_pole = 0.6;    // one-pole coefficient at full lateral angle
};

/// Woodworth interaural time difference (r / c)(theta + sin theta) for the
/// lateral angle theta in [0, pi/2].
double woodworth_itd(double azimuth_deg, const SphericalHead& head = {});

/// Spherical-head HRIR pair: the contralateral ear is delayed by the
/// Woodworth ITD and low-passed by a one-pole head-shadow filter.
HrirPair synth_hrir(double azimuth_deg, const SphericalHead& head = {});

/// Synthetic set on a uniform azimuth grid.
HrirSet synthetic_hrir_set(double step_deg = 5.0, const SphericalHead& head = {});

/// Loads a JSON index {"<azimuth>": {"left": path, "right": path}, ...} with
/// mono WAV files resolved relative to the index. Throws FormatError naming
/// the offending entry.
HrirSet load_hrir_set(const std::filesystem::path& index_path,
                      double expected_rate = kSampleRate);

/// Writes index.json plus one WAV per ear into `dir`.
void save_hrir_set(const std::filesystem::path& dir, const HrirSet& set);

}  // namespace batkit::scene
