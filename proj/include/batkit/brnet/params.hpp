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
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace batkit::brnet {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct ModelDims {
  int hidden = 96;
  int bands = 32;
  int looks = 12;
  int taps = 5;
  int df_bins = 160;

  int input_dim() const { return (1 + looks) * bands; }
  int df_outputs() const { return 2 * 2 * taps * df_bins; }

  void validate() const {
    if (hidden < 1 || bands < 2 || looks < 1 || taps < 1 || df_bins < 1) {
      throw std::invalid_argument("model dimensions must be positive");
    }
  }
  bool operator==(const ModelDims&) const = default;
};

/// Gated recurrent cell with PyTorch gate layout: rows [reset; update; new].
template <typename Scalar>
struct GruParams {
  Matrix<Scalar> w_ih, w_hh, b_ih, b_hh;
};

/// Named parameter set of the rendering network.
template <typename Scalar>
struct ModelParams {
  ModelDims dims;
  Matrix<Scalar> enc_in_w, enc_in_b;
  GruParams<Scalar> enc_gru;
  Matrix<Scalar> film_gamma, film_beta;  // hidden x 1, multiplied by alpha
  GruParams<Scalar> erb_gru;
  Matrix<Scalar> erb_out_w, erb_out_b;
  GruParams<Scalar> df_gru;
  Matrix<Scalar> df_out_w, df_out_b;

  /// Tensors in serialization order; names match tensor_names().
  std::vector<Matrix<Scalar>*> tensors() {
    return {&enc_in_w,      &enc_in_b,      &enc_gru.w_ih, &enc_gru.w_hh, &enc_gru.b_ih,
            &enc_gru.b_hh,  &film_gamma,    &film_beta,    &erb_gru.w_ih, &erb_gru.w_hh,
            &erb_gru.b_ih,  &erb_gru.b_hh,  &erb_out_w,    &erb_out_b,    &df_gru.w_ih,
            &df_gru.w_hh,   &df_gru.b_ih,   &df_gru.b_hh,  &df_out_w,     &df_out_b};
  }
  std::vector<const Matrix<Scalar>*> tensors() const {
    auto mut = const_cast<ModelParams*>(this)->tensors();
    return {mut.begin(), mut.end()};
  }

  static const std::vector<std::string>& tensor_names() {
    static const std::vector<std::string> names{
        "enc_in.weight", "enc_in.bias",   "enc_gru.w_ih",   "enc_gru.w_hh",  "enc_gru.b_ih",
        "enc_gru.b_hh",  "film_gamma",    "film_beta",      "erb_gru.w_ih",  "erb_gru.w_hh",
        "erb_gru.b_ih",  "erb_gru.b_hh",  "erb_out.weight", "erb_out.bias",  "df_gru.w_ih",
        "df_gru.w_hh",   "df_gru.b_ih",   "df_gru.b_hh",    "df_out.weight", "df_out.bias"};
    return names;
  }

  /// Biases are stored as rank-1 tensors, everything else as rank 2.
  static bool is_vector(const std::string& name) {
    return name.ends_with(".bias") || name.ends_with(".b_ih") || name.ends_with(".b_hh");
  }

  static ModelParams zeros(const ModelDims& dims) {
    dims.validate();
    const int h = dims.hidden;
    ModelParams p;
    p.dims = dims;
    p.enc_in_w = Matrix<Scalar>::Zero(h, dims.input_dim());
    p.enc_in_b = Matrix<Scalar>::Zero(h, 1);
    for (auto* gru : {&p.enc_gru, &p.erb_gru, &p.df_gru}) {
      gru->w_ih = Matrix<Scalar>::Zero(3 * h, h);
      gru->w_hh = Matrix<Scalar>::Zero(3 * h, h);
      gru->b_ih = Matrix<Scalar>::Zero(3 * h, 1);
      gru->b_hh = Matrix<Scalar>::Zero(3 * h, 1);
    }
    p.film_gamma = Matrix<Scalar>::Zero(h, 1);
    p.film_beta = Matrix<Scalar>::Zero(h, 1);
    p.erb_out_w = Matrix<Scalar>::Zero(2 * dims.bands, h);
    p.erb_out_b = Matrix<Scalar>::Zero(2 * dims.bands, 1);
    p.df_out_w = Matrix<Scalar>::Zero(dims.df_outputs(), h);
    p.df_out_b = Matrix<Scalar>::Zero(dims.df_outputs(), 1);
    return p;
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; FiLM
  /// tensors stay zero so the conditioning starts as the identity.
  static ModelParams initialized(const ModelDims& dims, std::uint64_t seed) {
    ModelParams p = zeros(dims);
    std::mt19937_64 rng(seed);
    const auto fill = [&rng](Matrix<Scalar>& m, int fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(dist(rng));
    };
    const int h = dims.hidden;
    fill(p.enc_in_w, dims.input_dim());
    fill(p.enc_in_b, dims.input_dim());
    for (auto* gru : {&p.enc_gru, &p.erb_gru, &p.df_gru}) {
      fill(gru->w_ih, h);
      fill(gru->w_hh, h);
      fill(gru->b_ih, h);
      fill(gru->b_hh, h);
    }
    fill(p.erb_out_w, h);
    fill(p.erb_out_b, h);
    fill(p.df_out_w, h);
    fill(p.df_out_b, h);
    return p;
  }

  template <typename Other>
  ModelParams<Other> cast() const {
    ModelParams<Other> out = ModelParams<Other>::zeros(dims);
    auto dst = out.tensors();
    auto src = tensors();
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = src[i]->template cast<Other>();
    return out;
  }

  void set_zero() {
    for (auto* t : tensors()) t->setZero();
  }

  double squared_norm() const {
    double acc = 0.0;
    for (const auto* t : tensors()) acc += static_cast<double>(t->template cast<double>().squaredNorm());
    return acc;
  }

  bool all_finite() const {
    for (const auto* t : tensors()) {
      if (!t->allFinite()) return false;
    }
    return true;
  }
};

}  // namespace batkit::brnet
