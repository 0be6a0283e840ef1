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
#include <stdexcept>

#include <Eigen/Core>

#include "batkit/brnet/params.hpp"
#include "batkit/score/score.hpp"

namespace batkit::brnet {

/// Network heads, one column per frame.
template <typename Scalar>
struct ModelOutput {
  Matrix<Scalar> erb_gains;  // (2 * bands) x frames, rows ear * bands + b, in [0, 2]
  Matrix<Scalar> df_coeffs;  // df_outputs x frames, tanh outputs
  ModelDims dims;

  Eigen::Index frames() const { return erb_gains.cols(); }

  Scalar gain(Eigen::Index l, int ear, int band) const {
    return erb_gains(ear * dims.bands + band, l);
  }

  /// Row of the real part of C_{ear, tap}(f); the imaginary part follows.
  Eigen::Index coeff_row(int ear, int tap, int f) const {
    return 2 * ((static_cast<Eigen::Index>(ear) * dims.taps + tap) * dims.df_bins + f);
  }

  std::complex<Scalar> coeff(Eigen::Index l, int ear, int tap, int f) const {
    const Eigen::Index row = coeff_row(ear, tap, f);
    return {df_coeffs(row, l), df_coeffs(row + 1, l)};
  }
};

template <typename Scalar>
struct GruCache {
  Matrix<Scalar> input;   // in x L
  Matrix<Scalar> h_prev;  // H x L
  Matrix<Scalar> r, z, n, hn;
  Matrix<Scalar> h;       // outputs, H x L
};

template <typename Scalar>
struct ForwardCache {
  Matrix<Scalar> input;      // input_dim x L
  Matrix<Scalar> enc_pre;    // pre-ReLU encoder activations
  GruCache<Scalar> enc;
  Matrix<Scalar> embedding;  // FiLM output
  GruCache<Scalar> erb;
  GruCache<Scalar> df;
};

namespace detail {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) + (-x).exp()).inverse();
}

}  // namespace detail

/// Runs a GRU over the columns of x from a zero state.
template <typename Scalar>
Matrix<Scalar> gru_forward(const GruParams<Scalar>& p, const Matrix<Scalar>& x,
                           GruCache<Scalar>* cache) {
  const Eigen::Index hidden = p.w_hh.cols();
  const Eigen::Index frames = x.cols();
  Matrix<Scalar> gi = p.w_ih * x;
  gi.colwise() += p.b_ih.col(0);

  Matrix<Scalar> out(hidden, frames);
  if (cache) {
    cache->input = x;
    cache->h_prev.resize(hidden, frames);
    cache->r.resize(hidden, frames);
    cache->z.resize(hidden, frames);
    cache->n.resize(hidden, frames);
    cache->hn.resize(hidden, frames);
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> h = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(hidden);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gh(3 * hidden);
  for (Eigen::Index l = 0; l < frames; ++l) {
    gh.noalias() = p.w_hh * h;
    gh += p.b_hh.col(0);
    const auto gi_l = gi.col(l);
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> r =
        detail::sigmoid((gi_l.head(hidden) + gh.head(hidden)).array());
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> z =
        detail::sigmoid((gi_l.segment(hidden, hidden) + gh.segment(hidden, hidden)).array());
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> hn = gh.tail(hidden).array();
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> n =
        (gi_l.tail(hidden).array() + r * hn).tanh();
    if (cache) {
      cache->h_prev.col(l) = h;
      cache->r.col(l) = r.matrix();
      cache->z.col(l) = z.matrix();
      cache->n.col(l) = n.matrix();
      cache->hn.col(l) = hn.matrix();
    }
    h = ((Scalar(1) - z) * n + z * h.array()).matrix();
    out.col(l) = h;
  }
  if (cache) cache->h = out;
  return out;
}

/// Backpropagates d_out (H x L) through a cached GRU run. Accumulates
/// parameter gradients into `grad` and returns the input gradient.
template <typename Scalar>
Matrix<Scalar> gru_backward(const GruParams<Scalar>& p, const GruCache<Scalar>& c,
                            const Matrix<Scalar>& d_out, GruParams<Scalar>& grad) {
  const Eigen::Index hidden = p.w_hh.cols();
  const Eigen::Index frames = d_out.cols();
  Matrix<Scalar> d_gi(3 * hidden, frames);
  Matrix<Scalar> d_gh(3 * hidden, frames);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d_next = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(hidden);
  for (Eigen::Index l = frames - 1; l >= 0; --l) {
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> dh = (d_out.col(l) + d_next).array();
    const auto r = c.r.col(l).array();
    const auto z = c.z.col(l).array();
    const auto n = c.n.col(l).array();
    const auto hp = c.h_prev.col(l).array();
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> d_an = dh * (Scalar(1) - z) * (Scalar(1) - n * n);
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> d_az = dh * (hp - n) * z * (Scalar(1) - z);
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> d_ar =
        d_an * c.hn.col(l).array() * r * (Scalar(1) - r);
    d_gi.col(l) << d_ar.matrix(), d_az.matrix(), d_an.matrix();
    d_gh.col(l) << d_ar.matrix(), d_az.matrix(), (d_an * r).matrix();
    d_next = (dh * z).matrix();
    d_next.noalias() += p.w_hh.transpose() * d_gh.col(l);
  }
  grad.w_hh.noalias() += d_gh * c.h_prev.transpose();
  grad.b_hh += d_gh.rowwise().sum();
  grad.w_ih.noalias() += d_gi * c.input.transpose();
  grad.b_ih += d_gi.rowwise().sum();
  return p.w_ih.transpose() * d_gi;
}

/// Input matrix (input_dim x frames): rows [0, B) hold the reference
/// log-spectrum, rows (1 + q) * B + b hold SCORE band b of look q.
template <typename Scalar>
Matrix<Scalar> build_input(const score::ScoreFeature& feat) {
  const int bands = feat.bands;
  const int looks = feat.looks;
  Matrix<Scalar> x((1 + looks) * bands, feat.frames());
  for (Eigen::Index l = 0; l < feat.frames(); ++l) {
    for (int b = 0; b < bands; ++b) {
      x(b, l) = static_cast<Scalar>(feat.ref_logspec(l, b));
      for (int q = 0; q < looks; ++q) x((1 + q) * bands + b, l) = static_cast<Scalar>(feat.at(l, b, q));
    }
  }
  return x;
}

/// Forward pass on a prepared input matrix.
template <typename Scalar>
ModelOutput<Scalar> forward(const ModelParams<Scalar>& p, const Matrix<Scalar>& input, Scalar alpha,
                            ForwardCache<Scalar>* cache = nullptr) {
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1))) {
    throw std::invalid_argument("forward: alpha must lie in [0, 1]");
  }
  if (input.rows() != p.dims.input_dim()) {
    throw std::invalid_argument("forward: input has " + std::to_string(input.rows()) +
                                " rows, model expects " + std::to_string(p.dims.input_dim()));
  }
  if (!input.allFinite()) throw std::invalid_argument("forward: non-finite input");

  Matrix<Scalar> pre = p.enc_in_w * input;
  pre.colwise() += p.enc_in_b.col(0);
  const Matrix<Scalar> encoded = pre.cwiseMax(Scalar(0));
  const Matrix<Scalar> h = gru_forward(p.enc_gru, encoded, cache ? &cache->enc : nullptr);

  Matrix<Scalar> embedding =
      (Scalar(1) + alpha * p.film_gamma.col(0).array()).matrix().asDiagonal() * h;
  embedding.colwise() += alpha * p.film_beta.col(0);

  const Matrix<Scalar> h_erb = gru_forward(p.erb_gru, embedding, cache ? &cache->erb : nullptr);
  const Matrix<Scalar> h_df = gru_forward(p.df_gru, embedding, cache ? &cache->df : nullptr);

  ModelOutput<Scalar> out;
  out.dims = p.dims;
  Matrix<Scalar> erb_logits = p.erb_out_w * h_erb;
  erb_logits.colwise() += p.erb_out_b.col(0);
  out.erb_gains = Scalar(2) * detail::sigmoid(erb_logits.array()).matrix();
  Matrix<Scalar> df_logits = p.df_out_w * h_df;
  df_logits.colwise() += p.df_out_b.col(0);
  out.df_coeffs = df_logits.array().tanh().matrix();

  if (cache) {
    cache->input = input;
    cache->enc_pre = std::move(pre);
    cache->embedding = std::move(embedding);
  }
  return out;
}

/// Forward pass on a SCORE feature.
template <typename Scalar>
ModelOutput<Scalar> forward(const ModelParams<Scalar>& p, const score::ScoreFeature& feat,
                            Scalar alpha) {
  if (feat.bands != p.dims.bands || feat.looks != p.dims.looks) {
    throw std::invalid_argument("forward: feature dimensions do not match the model");
  }
  return forward(p, build_input<Scalar>(feat), alpha);
}

/// Backpropagates head gradients through a cached forward pass and
/// accumulates into `grad`.
template <typename Scalar>
void backward(const ModelParams<Scalar>& p, const ForwardCache<Scalar>& cache,
              const ModelOutput<Scalar>& out, Scalar alpha, const Matrix<Scalar>& d_gains,
              const Matrix<Scalar>& d_coeffs, ModelParams<Scalar>& grad) {
  // gains = 2 sigmoid(x): d/dx = 2 s (1 - s) with s = gains / 2.
  const auto s = (out.erb_gains.array() * Scalar(0.5));
  const Matrix<Scalar> d_erb_logits = (d_gains.array() * Scalar(2) * s * (Scalar(1) - s)).matrix();
  const Matrix<Scalar> d_df_logits =
      (d_coeffs.array() * (Scalar(1) - out.df_coeffs.array().square())).matrix();

  grad.erb_out_w.noalias() += d_erb_logits * cache.erb.h.transpose();
  grad.erb_out_b += d_erb_logits.rowwise().sum();
  grad.df_out_w.noalias() += d_df_logits * cache.df.h.transpose();
  grad.df_out_b += d_df_logits.rowwise().sum();

  const Matrix<Scalar> d_h_erb = p.erb_out_w.transpose() * d_erb_logits;
  const Matrix<Scalar> d_h_df = p.df_out_w.transpose() * d_df_logits;
  Matrix<Scalar> d_embedding = gru_backward(p.erb_gru, cache.erb, d_h_erb, grad.erb_gru);
  d_embedding += gru_backward(p.df_gru, cache.df, d_h_df, grad.df_gru);

  const Matrix<Scalar>& h = cache.enc.h;
  grad.film_gamma += alpha * d_embedding.cwiseProduct(h).rowwise().sum();
  grad.film_beta += alpha * d_embedding.rowwise().sum();
  const Matrix<Scalar> d_h =
      (Scalar(1) + alpha * p.film_gamma.col(0).array()).matrix().asDiagonal() * d_embedding;

  const Matrix<Scalar> d_encoded = gru_backward(p.enc_gru, cache.enc, d_h, grad.enc_gru);
  const Matrix<Scalar> d_pre =
      (d_encoded.array() * (cache.enc_pre.array() > Scalar(0)).template cast<Scalar>()).matrix();
  grad.enc_in_w.noalias() += d_pre * cache.input.transpose();
  grad.enc_in_b += d_pre.rowwise().sum();
}

}  // namespace batkit::brnet
