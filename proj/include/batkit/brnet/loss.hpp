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

#include <cmath>
#include <complex>
#include <stdexcept>

#include "batkit/brnet/deep_filter.hpp"
#include "batkit/dsp/stft.hpp"

namespace batkit::brnet {

inline constexpr double kMagnitudeFloor = 1e-12;

/// Compressed complex MSE summed over ears, frames and bins:
///   sum (|Y|^c - |Yh|^c)^2 + sum | |Y|^c e^{j<Y} - |Yh|^c e^{j<Yh} |^2,
/// magnitudes floored at 1e-12. When `grad` is given it receives
/// dL/dRe(Yh) + j dL/dIm(Yh); floored bins get zero gradient.
template <typename Scalar>
double compressed_loss(const EarPair<Scalar>& target, const EarPair<Scalar>& estimate,
                       double compression, EarPair<Scalar>* grad = nullptr) {
  if (!(compression > 0.0 && compression <= 1.0)) {
    throw std::invalid_argument("loss: compression must lie in (0, 1]");
  }
  for (int ear = 0; ear < 2; ++ear) {
    if (target[ear].rows() != estimate[ear].rows() || target[ear].cols() != estimate[ear].cols()) {
      throw std::invalid_argument("loss: target and estimate shapes differ");
    }
  }
  if (grad) {
    for (int ear = 0; ear < 2; ++ear) grad->at(ear).setZero(estimate[ear].rows(), estimate[ear].cols());
  }
  const double c = compression;
  double total = 0.0;
  for (int ear = 0; ear < 2; ++ear) {
    const auto& y = target[ear];
    const auto& yh = estimate[ear];
    for (Eigen::Index l = 0; l < y.rows(); ++l) {
      for (Eigen::Index f = 0; f < y.cols(); ++f) {
        const std::complex<double> t(y(l, f));
        const std::complex<double> e(yh(l, f));
        const double tr = std::max(std::abs(t), kMagnitudeFloor);
        const double raw_er = std::abs(e);
        const double er = std::max(raw_er, kMagnitudeFloor);
        const double tc = std::pow(tr, c);
        const double ec = std::pow(er, c);
        const std::complex<double> tu = std::polar(1.0, std::arg(t));
        const std::complex<double> eu = std::polar(1.0, std::arg(e));
        const double mag_err = tc - ec;
        total += mag_err * mag_err + std::norm(tc * tu - ec * eu);
        if (grad && raw_er >= kMagnitudeFloor) {
          const std::complex<double> a = tc * tu;
          const std::complex<double> proj = std::conj(a) * eu;
          const double dc = c * std::pow(er, c - 1.0);
          const double d_r = -2.0 * mag_err * dc - 2.0 * dc * proj.real() + 2.0 * c * std::pow(er, 2.0 * c - 1.0);
          const double d_phi = 2.0 * ec * proj.imag();
          const std::complex<double> g = d_r * eu + (d_phi / er) * std::complex<double>(0.0, 1.0) * eu;
          (*grad)[ear](l, f) = std::complex<Scalar>(static_cast<Scalar>(g.real()), static_cast<Scalar>(g.imag()));
        }
      }
    }
  }
  return total;
}

/// Loss between binaural spectrogram pairs (left, right).
inline double loss(const std::pair<dsp::Spectrogram, dsp::Spectrogram>& target,
                   const std::pair<dsp::Spectrogram, dsp::Spectrogram>& estimate, double compression) {
  const EarPair<double> t{target.first.data, target.second.data};
  const EarPair<double> e{estimate.first.data, estimate.second.data};
  return compressed_loss(t, e, compression);
}

}  // namespace batkit::brnet
