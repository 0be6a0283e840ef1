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

#include <stdexcept>

#include <Eigen/Core>

namespace batkit::dsp {

/// ERB-rate (in ERB units) of a frequency in Hz.
double erb_rate(double hz);
double erb_rate_to_hz(double rate);

/// Triangular filterbank on the ERB-rate scale.
///
/// Band b has its peak at centers_hz[b]; its triangle spans the neighbouring
/// centres, so adjacent bands overlap by half. Band 0 starts at 0 Hz and is
/// flat below its centre, the last band is flat above its centre up to
/// Nyquist, so the weights form a partition of unity over the bins.
struct ErbFilterbank {
  Eigen::MatrixXd weights;      // bands x bins, w_b(f) >= 0
  Eigen::VectorXd normalizers;  // pi_b = sum_f w_b(f)
  Eigen::VectorXd bin_totals;   // sum_b w_b(f)
  Eigen::VectorXd centers_hz;

  Eigen::Index bands() const { return weights.rows(); }
  Eigen::Index bins() const { return weights.cols(); }
};

ErbFilterbank build_erb_filterbank(int bands, int bins, double sample_rate);

/// out(l, b) = (1 / pi_b) sum_f w_b(f) in(l, f). Rows are frames.
/// Both sums run over f in the same order, so inputs in [-1, 1] give outputs
/// in [-1, 1] exactly under round-to-nearest.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
erb_compress(const Eigen::MatrixBase<Derived>& values,
             const ErbFilterbank& fb) {
  using Scalar = typename Derived::Scalar;
  if (values.cols() != fb.bins()) {
    throw std::invalid_argument("erb_compress: bin count does not match filterbank");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(values.rows(), fb.bands());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> acc(values.rows());
  for (Eigen::Index b = 0; b < fb.bands(); ++b) {
    acc.setZero();
    Scalar total(0);
    for (Eigen::Index f = 0; f < fb.bins(); ++f) {
      const auto w = static_cast<Scalar>(fb.weights(b, f));
      if (w == Scalar(0)) continue;
      acc += w * values.col(f);
      total += w;
    }
    out.col(b) = acc / total;
  }
  return out;
}

/// Per-bin gain sum_b w_b(f) g_b / sum_b w_b(f). Rows are frames.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
erb_expand(const Eigen::MatrixBase<Derived>& band_values,
           const ErbFilterbank& fb) {
  using Scalar = typename Derived::Scalar;
  if (band_values.cols() != fb.bands()) {
    throw std::invalid_argument("erb_expand: band count does not match filterbank");
  }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> weights =
      (fb.weights * fb.bin_totals.cwiseInverse().asDiagonal())
          .template cast<Scalar>();
  return band_values * weights;
}

}  // namespace batkit::dsp
