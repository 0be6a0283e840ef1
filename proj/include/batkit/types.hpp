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

#include <complex>

#include <Eigen/Core>

namespace batkit {

inline constexpr double kSampleRate = 16000.0;
inline constexpr double kSoundSpeed = 343.0;

using Complex = std::complex<double>;

/// Mono time-domain signal.
using Signal = Eigen::VectorXd;

/// Multichannel time-domain signal, one column per channel.
using MultiSignal = Eigen::MatrixXd;

/// Two-channel (left/right) time-domain signal.
struct BinauralPair {
  Signal left;
  Signal right;

  Eigen::Index size() const { return left.size(); }
};

}  // namespace batkit
