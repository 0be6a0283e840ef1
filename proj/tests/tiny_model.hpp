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
#include <random>

#include "batkit/brnet/grad.hpp"
#include "batkit/dsp/erb.hpp"

namespace batkit::testing {

inline brnet::ModelDims tiny_dims() {
  brnet::ModelDims d;
  d.hidden = 8;
  d.bands = 4;
  d.looks = 2;
  d.taps = 5;
  d.df_bins = 6;
  return d;
}

inline constexpr int kTinyBins = 17;  // frame size 32

inline dsp::ErbFilterbank tiny_filterbank() {
  return dsp::build_erb_filterbank(tiny_dims().bands, kTinyBins, 16000.0);
}

/// Random parameters with nonzero FiLM weights so every tensor carries
/// gradient. The first deep-filter tap is biased towards 1 so filtered bins
/// stay away from zero magnitude, where the compressed loss is not smooth.
inline brnet::ModelParams<double> tiny_params(std::uint64_t seed) {
  auto p = brnet::ModelParams<double>::initialized(tiny_dims(), seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> n(0.0, 0.3);
  for (Eigen::Index i = 0; i < p.film_gamma.size(); ++i) p.film_gamma(i) = n(rng);
  for (Eigen::Index i = 0; i < p.film_beta.size(); ++i) p.film_beta(i) = n(rng);
  brnet::ModelOutput<double> layout;
  layout.dims = p.dims;
  for (int ear = 0; ear < 2; ++ear) {
    for (int f = 0; f < p.dims.df_bins; ++f) p.df_out_b(layout.coeff_row(ear, 0, f)) += 1.5;
  }
  return p;
}

inline brnet::ComplexMatrix<double> random_spectrum(std::mt19937_64& rng, Eigen::Index frames,
                                                    Eigen::Index bins) {
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  brnet::ComplexMatrix<double> m(frames, bins);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::polar(mag(rng), phase(rng));
  return m;
}

inline brnet::TrainItem<double> tiny_item(std::uint64_t seed, Eigen::Index frames = 12) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  brnet::TrainItem<double> item;
  item.input.resize(tiny_dims().input_dim(), frames);
  for (Eigen::Index i = 0; i < item.input.size(); ++i) item.input.data()[i] = n(rng);
  item.ref = random_spectrum(rng, frames, kTinyBins);
  for (int ear = 0; ear < 2; ++ear) {
    item.clean[ear] = random_spectrum(rng, frames, kTinyBins);
    item.ambience[ear] = random_spectrum(rng, frames, kTinyBins) * 0.5;
  }
  return item;
}

}  // namespace batkit::testing
