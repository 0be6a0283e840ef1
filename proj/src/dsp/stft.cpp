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

#include "batkit/dsp/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace batkit::dsp {

Eigen::VectorXd make_window(int frame_size) {
  if (frame_size <= 0 || frame_size % 2 != 0) {
    throw std::invalid_argument("make_window: frame_size must be positive and even");
  }
  Eigen::VectorXd w(frame_size);
  for (int n = 0; n < frame_size; ++n) {
    w[n] = std::sin(std::numbers::pi * n / frame_size);
  }
  return w;
}

Eigen::Index frame_count(Eigen::Index length, int frame_size, int hop) {
  if (length < frame_size) return 0;
  return (length - frame_size) / hop + 1;
}

Spectrogram stft(const Eigen::Ref<const Eigen::VectorXd>& signal,
                 int frame_size, int hop, double sample_rate) {
  if (hop <= 0) throw std::invalid_argument("stft: hop must be positive");
  const Eigen::VectorXd window = make_window(frame_size);
  if (signal.size() < frame_size) {
    throw std::invalid_argument("stft: signal shorter than one frame");
  }
  const Eigen::Index frames = frame_count(signal.size(), frame_size, hop);
  const int bins = frame_size / 2 + 1;

  Spectrogram spec;
  spec.frame_size = frame_size;
  spec.hop = hop;
  spec.sample_rate = sample_rate;
  spec.data.resize(frames, bins);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(frame_size);
  std::vector<Complex> out(frame_size);
  for (Eigen::Index l = 0; l < frames; ++l) {
    const Eigen::Index start = l * hop;
    for (int n = 0; n < frame_size; ++n) frame[n] = signal[start + n] * window[n];
    fft.fwd(out.data(), frame.data(), frame_size);
    for (int f = 0; f < bins; ++f) spec.data(l, f) = out[f];
  }
  return spec;
}

Eigen::VectorXd istft(const Spectrogram& spec) {
  const int frame_size = spec.frame_size;
  if (frame_size <= 0 || spec.hop <= 0 || spec.bins() != frame_size / 2 + 1) {
    throw std::invalid_argument("istft: spectrogram geometry does not match frame size");
  }
  const Eigen::VectorXd window = make_window(frame_size);
  const Eigen::Index frames = spec.frames();
  if (frames == 0) return Eigen::VectorXd();

  Eigen::VectorXd out = Eigen::VectorXd::Zero((frames - 1) * spec.hop + frame_size);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<Complex> half(spec.bins());
  std::vector<double> frame(frame_size);
  for (Eigen::Index l = 0; l < frames; ++l) {
    for (Eigen::Index f = 0; f < spec.bins(); ++f) half[f] = spec.data(l, f);
    fft.inv(frame.data(), half.data(), frame_size);
    const Eigen::Index start = l * spec.hop;
    for (int n = 0; n < frame_size; ++n) out[start + n] += frame[n] * window[n];
  }
  return out;
}

}  // namespace batkit::dsp
