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
#include <cmath>
#include <sstream>

#include "batkit/brnet/deep_filter.hpp"
#include "batkit/brnet/loss.hpp"
#include "batkit/brnet/model.hpp"
#include "batkit/error.hpp"

namespace batkit::brnet {

/// One training scene: network input plus reference spectrum and the two
/// target stems per ear. The target for ambience factor alpha is
/// clean + alpha * ambience.
template <typename Scalar>
struct TrainItem {
  Matrix<Scalar> input;                  // input_dim x frames
  ComplexMatrix<Scalar> ref;             // frames x bins
  EarPair<Scalar> clean;
  EarPair<Scalar> ambience;

  EarPair<Scalar> target(Scalar alpha) const {
    return {ComplexMatrix<Scalar>(clean[0] + alpha * ambience[0]),
            ComplexMatrix<Scalar>(clean[1] + alpha * ambience[1])};
  }
};

namespace detail {

template <typename Scalar>
[[noreturn]] void throw_non_finite(const ModelOutput<Scalar>& out, const EarPair<Scalar>& est,
                                   double loss) {
  std::ostringstream msg;
  msg << "non-finite loss (" << loss << ")";
  for (Eigen::Index l = 0; l < out.frames(); ++l) {
    const bool heads = out.erb_gains.col(l).allFinite() && out.df_coeffs.col(l).allFinite();
    const bool spec = est[0].row(l).allFinite() && est[1].row(l).allFinite();
    if (!heads || !spec) {
      msg << "; first bad frame " << l << (heads ? " (spectrum)" : " (network heads)");
      break;
    }
  }
  throw TrainingError(msg.str());
}

}  // namespace detail

/// Loss of one item at the given alpha. When `grad` is non-null the
/// parameter gradients are accumulated into it.
template <typename Scalar>
double loss_and_grad(const ModelParams<Scalar>& params, const TrainItem<Scalar>& item, Scalar alpha,
                     double compression, const dsp::ErbFilterbank& fb,
                     ModelParams<Scalar>* grad = nullptr) {
  ForwardCache<Scalar> cache;
  const ModelOutput<Scalar> out = forward(params, item.input, alpha, grad ? &cache : nullptr);
  EarPair<Scalar> masked;
  const EarPair<Scalar> est = apply_output(out, item.ref, fb, &masked);
  EarPair<Scalar> d_est;
  const double value = compressed_loss(item.target(alpha), est, compression, grad ? &d_est : nullptr);
  if (!std::isfinite(value)) detail::throw_non_finite(out, est, value);
  if (grad) {
    Matrix<Scalar> d_gains, d_coeffs;
    apply_output_backward(out, item.ref, masked, d_est, fb, d_gains, d_coeffs);
    backward(params, cache, out, alpha, d_gains, d_coeffs, *grad);
  }
  return value;
}

}  // namespace batkit::brnet
