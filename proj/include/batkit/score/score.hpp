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

#include <span>
#include <vector>

#include <Eigen/Core>

#include "batkit/dsp/erb.hpp"
#include "batkit/dsp/stft.hpp"
#include "batkit/scene/geometry.hpp"
#include "batkit/types.hpp"

namespace batkit::score {

inline constexpr double kEpsilon = 1e-12;

/// Short-term relative transfer functions of one frame, (M - 1) x bins, rows
/// in ArrayGeometry::channel_order() minus the reference.
struct RtfFrame {
  Eigen::MatrixXcd values;
  int radius = 0;
};

/// Per-bin plane-wave steering matrices with the reference row deleted.
struct SteeringMatrix {
  std::vector<Eigen::MatrixXcd> per_bin;  // bins entries, each (M - 1) x Q
  std::vector<double> look_directions;    // degrees
  double sound_speed = kSoundSpeed;

  int looks() const { return static_cast<int>(look_directions.size()); }
};

struct ScoreParams {
  int radius = 2;
  int looks = 12;
};

/// ERB-compressed SCORE tensor plus the standardized reference log-spectrum.
struct ScoreFeature {
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  RowMatrix score;        // frames x (bands * looks), index b * looks + q
  RowMatrix ref_logspec;  // frames x bands
  int bands = 0;
  int looks = 0;

  Eigen::Index frames() const { return score.rows(); }
  double at(Eigen::Index l, int b, int q) const { return score(l, b * looks + q); }
};

/// R^m(l, f) = sum_n X^m X^1* / (sum_n |X^1|^2 + eps) over frames
/// n in [l - R, l + R] clipped to the signal. `specs` are in channel order
/// with the reference first.
RtfFrame short_term_rtf(std::span<const dsp::Spectrogram> specs, Eigen::Index frame, int radius);

/// Entry-wise R / |R|; entries with |R| < 1e-12 become 1.
Eigen::MatrixXcd whiten_delete(const RtfFrame& rtf);

/// a_q(f)[m] = exp(-j 2 pi f dtau_m(theta_q)), dtau_m = u(theta_q) . (x_ref - x_m) / c,
/// with u the unit vector towards azimuth theta_q = q * 360 / Q degrees.
SteeringMatrix build_steering(const scene::ArrayGeometry& geometry, int looks, int bins,
                              double sample_rate = kSampleRate);

/// zeta = Re{A^H r} / (M - 1).
Eigen::VectorXd score_vector(const Eigen::Ref<const Eigen::VectorXcd>& whitened,
                             const Eigen::MatrixXcd& steering);

/// Uncompressed SCORE of one frame, bins x Q.
Eigen::MatrixXd score_frame(std::span<const dsp::Spectrogram> specs, Eigen::Index frame,
                            const SteeringMatrix& steering, int radius);

/// Full pipeline from spectrograms given in geometry channel order
/// (specs[m] belongs to mic m).
ScoreFeature extract_score(std::span<const dsp::Spectrogram> specs,
                           const scene::ArrayGeometry& geometry, const dsp::ErbFilterbank& fb,
                           const ScoreParams& params = {});

/// Full pipeline from time-domain mic signals (samples x M).
ScoreFeature extract_score(const MultiSignal& mics, const scene::ArrayGeometry& geometry,
                           const dsp::ErbFilterbank& fb, const ScoreParams& params = {});

}  // namespace batkit::score
