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

#include "batkit/dsp/convolve.hpp"

#include <algorithm>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace batkit::dsp {
namespace {

constexpr Eigen::Index kDirectLimit = 64;

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Eigen::VectorXd convolve(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() == 0 || b.size() == 0) return Eigen::VectorXd();
  return convolve(a, b, a.size() + b.size() - 1);
}

Eigen::VectorXd convolve(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b,
                         Eigen::Index length) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(length);
  if (a.size() == 0 || b.size() == 0 || length == 0) return out;
  const Eigen::Index full = a.size() + b.size() - 1;

  if (std::min(a.size(), b.size()) <= kDirectLimit) {
    const auto& longer = a.size() >= b.size() ? a : b;
    const auto& shorter = a.size() >= b.size() ? b : a;
    for (Eigen::Index k = 0; k < shorter.size(); ++k) {
      const double g = shorter[k];
      if (g == 0.0) continue;
      const Eigen::Index n = std::min(longer.size(), length - k);
      if (n <= 0) break;
      out.segment(k, n) += g * longer.head(n);
    }
    return out;
  }

  const Eigen::Index nfft = next_pow2(full);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> xa(nfft, 0.0), xb(nfft, 0.0), y(nfft);
  std::copy(a.data(), a.data() + a.size(), xa.begin());
  std::copy(b.data(), b.data() + b.size(), xb.begin());
  std::vector<std::complex<double>> fa(nfft), fb(nfft);
  fft.fwd(fa.data(), xa.data(), nfft);
  fft.fwd(fb.data(), xb.data(), nfft);
  for (Eigen::Index k = 0; k <= nfft / 2; ++k) fa[k] *= fb[k];
  fft.inv(y.data(), fa.data(), nfft);
  const Eigen::Index n = std::min(length, full);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = y[i];
  return out;
}

double mean_power(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == 0) return 0.0;
  return x.squaredNorm() / static_cast<double>(x.size());
}

}  // namespace batkit::dsp
