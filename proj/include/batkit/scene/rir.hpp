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

#include <Eigen/Core>

#include "batkit/types.hpp"

namespace batkit::scene {

/// Shoebox room with the array placed at `array_center`, rotated by
/// `array_yaw` (radians) about the vertical axis.
struct RoomSpec {
  Eigen::Vector3d dimensions{6.0, 4.0, 3.0};
  double t60 = 0.5;
  Eigen::Vector3d array_center{3.0, 2.0, 1.5};
  double array_yaw = 0.0;

  bool contains(const Eigen::Vector3d& p) const;
};

/// Time-domain acoustic transfer function from one source to one mic.
struct Rir {
  Eigen::VectorXd taps;
  double sample_rate = kSampleRate;
  double direct_delay = 0.0;  // samples, fractional
};

/// Exact decomposition rir = clean + late.
struct RirSplit {
  Rir clean;
  Rir late;
};

/// Uniform wall absorption from Sabine's formula a = 0.161 V / (S t60),
/// clamped to (0, 1]. Returns the pressure reflection coefficient sqrt(1 - a);
/// zero for t60 == 0. simulate_rir refines this per response.
double reflection_coefficient(const RoomSpec& room);

/// Image-source response of a shoebox room with uniform absorption.
///
/// Every image arriving within t60 seconds (by which point the decay has
/// reached -60 dB) is placed with amplitude beta^k / (4 pi d) at delay d / c,
/// realized as a 16-tap Hann-windowed sinc, and the sum is high-passed at
/// 50 Hz. beta is chosen so the Schroeder decay of the image energies equals
/// t60. t60 == 0 yields only the direct path, unfiltered.
Rir simulate_rir(const RoomSpec& room, const Eigen::Vector3d& source_pos,
                 const Eigen::Vector3d& mic_pos, double sample_rate = kSampleRate);

/// Keeps the direct path and `early_ms` of early reflections untouched and
/// imposes an exponential envelope reaching -60 dB after `target_t60`
/// seconds on the rest. `late` is the residual rir - clean.
RirSplit split_clean_late(const Rir& rir, double early_ms = 20.0,
                          double target_t60 = 0.2);

/// Decay time from Schroeder backward integration, using a least-squares
/// line fitted to the energy decay curve between -5 and -25 dB and
/// extrapolated to -60 dB. Returns NaN when the curve never reaches -25 dB.
double schroeder_t60(const Eigen::Ref<const Eigen::VectorXd>& taps, double sample_rate);

}  // namespace batkit::scene
