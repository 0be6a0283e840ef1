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

namespace batkit::dsp {

using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kFrameSize = 512;
inline constexpr int kHop = 256;

/// One-sided complex STFT of a single channel, indexed (frame, bin).
struct Spectrogram {
  ComplexMatrix data;
  int frame_size = kFrameSize;
  int hop = kHop;
  double sample_rate = kSampleRate;

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index bins() const { return data.cols(); }

  /// Centre frequency of bin f in Hz.
  double bin_hz(Eigen::Index f) const {
    return static_cast<double>(f) * sample_rate / frame_size;
  }
};

/// Square-root periodic Hann window, w[n] = sin(pi n / N). Its square sums to
/// one at 50% overlap.
Eigen::VectorXd make_window(int frame_size);

/// Number of full frames; the trailing partial frame is dropped.
Eigen::Index frame_count(Eigen::Index length, int frame_size, int hop);

/// Forward transform is unnormalized, so for a frame x with window w,
/// sum_k |X_k|^2 over the full two-sided spectrum equals
/// frame_size * sum_n (w[n] x[n])^2.
Spectrogram stft(const Eigen::Ref<const Eigen::VectorXd>& signal,
                 int frame_size = kFrameSize, int hop = kHop,
                 double sample_rate = kSampleRate);

/// Weighted overlap-add with the synthesis window; no window-sum
/// normalization, so output length is (frames - 1) * hop + frame_size and the
/// first and last hop are attenuated.
Eigen::VectorXd istft(const Spectrogram& spec);

}  // namespace batkit::dsp
