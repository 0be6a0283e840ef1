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

#include "batkit/dsp/erb.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace batkit::dsp {

double erb_rate(double hz) { return 21.4 * std::log10(1.0 + 0.00437 * hz); }

double erb_rate_to_hz(double rate) {
  return (std::pow(10.0, rate / 21.4) - 1.0) / 0.00437;
}

ErbFilterbank build_erb_filterbank(int bands, int bins, double sample_rate) {
  if (bands < 2) throw std::invalid_argument("build_erb_filterbank: need at least 2 bands");
  if (bins < bands) {
    throw std::invalid_argument("build_erb_filterbank: more bands than bins");
  }
  const double nyquist = sample_rate / 2.0;
  const double top = erb_rate(nyquist);
  // bands + 2 equally spaced ERB-rate points; interior ones are the centres.
  const double step = top / (bands + 1);
  Eigen::VectorXd centers(bands);
  for (int b = 0; b < bands; ++b) centers[b] = step * (b + 1);

  ErbFilterbank fb;
  fb.weights = Eigen::MatrixXd::Zero(bands, bins);
  fb.centers_hz = centers.unaryExpr([](double r) { return erb_rate_to_hz(r); });
  for (int f = 0; f < bins; ++f) {
    const double rate = erb_rate(nyquist * f / (bins - 1));
    if (rate <= centers[0]) {
      fb.weights(0, f) = 1.0;
      continue;
    }
    if (rate >= centers[bands - 1]) {
      fb.weights(bands - 1, f) = 1.0;
      continue;
    }
    int b = static_cast<int>(std::floor(rate / step)) - 1;
    if (b < 0) b = 0;
    if (b > bands - 2) b = bands - 2;
    while (b > 0 && rate < centers[b]) --b;
    while (b < bands - 2 && rate > centers[b + 1]) ++b;
    const double upper = (rate - centers[b]) / (centers[b + 1] - centers[b]);
    fb.weights(b, f) = 1.0 - upper;
    fb.weights(b + 1, f) = upper;
  }

  // Sequential accumulation, so pi_b is reproducible bit-for-bit.
  fb.normalizers.resize(bands);
  for (int b = 0; b < bands; ++b) {
    double sum = 0.0;
    for (int f = 0; f < bins; ++f) sum += fb.weights(b, f);
    if (!(sum > 0.0)) {
      throw std::invalid_argument("build_erb_filterbank: band " + std::to_string(b) +
                                  " covers no bins");
    }
    fb.normalizers[b] = sum;
  }
  fb.bin_totals.resize(bins);
  for (int f = 0; f < bins; ++f) {
    double sum = 0.0;
    for (int b = 0; b < bands; ++b) sum += fb.weights(b, f);
    fb.bin_totals[f] = sum;
  }
  return fb;
}

}  // namespace batkit::dsp
