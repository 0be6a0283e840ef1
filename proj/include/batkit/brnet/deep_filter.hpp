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

#include <array>
#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "batkit/brnet/model.hpp"
#include "batkit/dsp/erb.hpp"
#include "batkit/dsp/stft.hpp"

namespace batkit::brnet {

/// Complex spectrum indexed (frame, bin).
template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using EarPair = std::array<ComplexMatrix<Scalar>, 2>;

/// ERB-masked reference spectra per ear (stage 1).
template <typename Scalar>
EarPair<Scalar> erb_mask(const ModelOutput<Scalar>& out, const ComplexMatrix<Scalar>& ref,
                         const dsp::ErbFilterbank& fb) {
  const int bands = out.dims.bands;
  if (fb.bands() != bands || fb.bins() != ref.cols()) {
    throw std::invalid_argument("apply_output: filterbank does not match model or spectrum");
  }
  if (out.frames() != ref.rows()) throw std::invalid_argument("apply_output: frame count mismatch");
  EarPair<Scalar> masked;
  for (int ear = 0; ear < 2; ++ear) {
    const Matrix<Scalar> gains =
        dsp::erb_expand(out.erb_gains.middleRows(ear * bands, bands).transpose(), fb);
    masked[ear] = ref.cwiseProduct(gains.template cast<std::complex<Scalar>>());
  }
  return masked;
}

/// Causal deep filter over bins below df_bins (stage 2):
/// Y(l, f) = sum_i C_i(l, f) masked(l - i, f), zero history before frame 0.
template <typename Scalar>
EarPair<Scalar> deep_filter(const ModelOutput<Scalar>& out, const EarPair<Scalar>& masked) {
  const ModelDims& d = out.dims;
  if (masked[0].cols() < d.df_bins) throw std::invalid_argument("apply_output: fewer bins than df_bins");
  EarPair<Scalar> y = masked;
  const Eigen::Index frames = masked[0].rows();
  for (int ear = 0; ear < 2; ++ear) {
    for (Eigen::Index l = 0; l < frames; ++l) {
      for (int f = 0; f < d.df_bins; ++f) {
        std::complex<Scalar> acc(0);
        for (int i = 0; i < d.taps && i <= l; ++i) {
          acc += out.coeff(l, ear, i, f) * masked[ear](l - i, f);
        }
        y[ear](l, f) = acc;
      }
    }
  }
  return y;
}

template <typename Scalar>
EarPair<Scalar> apply_output(const ModelOutput<Scalar>& out, const ComplexMatrix<Scalar>& ref,
                             const dsp::ErbFilterbank& fb, EarPair<Scalar>* masked_out = nullptr) {
  EarPair<Scalar> masked = erb_mask(out, ref, fb);
  EarPair<Scalar> y = deep_filter(out, masked);
  if (masked_out) *masked_out = std::move(masked);
  return y;
}

/// Applies the network output to the reference spectrogram, returning the
/// left and right ear spectrograms.
template <typename Scalar>
std::pair<dsp::Spectrogram, dsp::Spectrogram> apply_output(const ModelOutput<Scalar>& out,
                                                           const dsp::Spectrogram& ref,
                                                           const dsp::ErbFilterbank& fb) {
  const EarPair<Scalar> y =
      apply_output(out, ComplexMatrix<Scalar>(ref.data.template cast<std::complex<Scalar>>()), fb);
  std::pair<dsp::Spectrogram, dsp::Spectrogram> ears{ref, ref};
  ears.first.data = y[0].template cast<Complex>();
  ears.second.data = y[1].template cast<Complex>();
  return ears;
}

/// Gradients of the head outputs given dL/dY per ear (complex gradients
/// dL/dRe + j dL/dIm).
template <typename Scalar>
void apply_output_backward(const ModelOutput<Scalar>& out, const ComplexMatrix<Scalar>& ref,
                           const EarPair<Scalar>& masked, const EarPair<Scalar>& d_y,
                           const dsp::ErbFilterbank& fb, Matrix<Scalar>& d_gains,
                           Matrix<Scalar>& d_coeffs) {
  const ModelDims& d = out.dims;
  const Eigen::Index frames = ref.rows();
  d_gains.setZero(2 * d.bands, frames);
  d_coeffs.setZero(d.df_outputs(), frames);
  const Matrix<Scalar> expand =
      (fb.weights * fb.bin_totals.cwiseInverse().asDiagonal()).template cast<Scalar>();
  for (int ear = 0; ear < 2; ++ear) {
    ComplexMatrix<Scalar> d_masked = d_y[ear];
    d_masked.leftCols(d.df_bins).setZero();
    for (Eigen::Index l = 0; l < frames; ++l) {
      for (int f = 0; f < d.df_bins; ++f) {
        const std::complex<Scalar> g = d_y[ear](l, f);
        for (int i = 0; i < d.taps && i <= l; ++i) {
          const std::complex<Scalar> dc = g * std::conj(masked[ear](l - i, f));
          const Eigen::Index row = out.coeff_row(ear, i, f);
          d_coeffs(row, l) += dc.real();
          d_coeffs(row + 1, l) += dc.imag();
          d_masked(l - i, f) += g * std::conj(out.coeff(l, ear, i, f));
        }
      }
    }
    const Matrix<Scalar> d_bin_gain = (d_masked.array() * ref.conjugate().array()).real().matrix();
    d_gains.middleRows(ear * d.bands, d.bands) = expand * d_bin_gain.transpose();
  }
}

}  // namespace batkit::brnet
