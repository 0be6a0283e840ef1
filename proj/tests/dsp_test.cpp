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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "batkit/dsp/convolve.hpp"
#include "batkit/dsp/erb.hpp"
#include "batkit/dsp/stft.hpp"

namespace batkit::dsp {
namespace {

Eigen::VectorXd random_signal(std::uint64_t seed, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

TEST(Stft, WindowIsSqrtPeriodicHann) {
  const Eigen::VectorXd w = make_window(512);
  for (int n = 0; n < 512; ++n) EXPECT_DOUBLE_EQ(w[n], std::sin(std::numbers::pi * n / 512));
  // Squared window sums to one at 50% overlap.
  for (int n = 0; n < 256; ++n) EXPECT_NEAR(w[n] * w[n] + w[n + 256] * w[n + 256], 1.0, 1e-15);
  EXPECT_THROW(make_window(511), std::invalid_argument);
}

TEST(Stft, FrameCountDropsPartialFrame) {
  EXPECT_EQ(frame_count(80000, 512, 256), 311);  // five seconds at 16 kHz
  EXPECT_EQ(frame_count(512, 512, 256), 1);
  EXPECT_EQ(frame_count(767, 512, 256), 1);
  EXPECT_EQ(frame_count(768, 512, 256), 2);
  EXPECT_THROW(stft(Eigen::VectorXd::Zero(100)), std::invalid_argument);
}

TEST(Stft, MatchesDirectDftSummation) {
  const int n = 64, hop = 32;
  const Eigen::VectorXd x = random_signal(1, 300);
  const Spectrogram s = stft(x, n, hop);
  ASSERT_EQ(s.frames(), (300 - n) / hop + 1);
  ASSERT_EQ(s.bins(), n / 2 + 1);
  double worst = 0.0;
  for (Eigen::Index l = 0; l < s.frames(); ++l) {
    for (int k = 0; k <= n / 2; ++k) {
      Complex acc = 0.0;
      for (int t = 0; t < n; ++t) {
        const double w = std::sin(std::numbers::pi * t / n);
        acc += w * x[l * hop + t] * std::polar(1.0, -2.0 * std::numbers::pi * k * t / n);
      }
      worst = std::max(worst, std::abs(acc - s.data(l, k)));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Stft, ParsevalWithUnnormalizedForward) {
  const int n = 512;
  const Eigen::VectorXd x = random_signal(2, n);
  const Spectrogram s = stft(x, n, 256);
  const Eigen::VectorXd w = make_window(n);
  double two_sided = std::norm(s.data(0, 0)) + std::norm(s.data(0, n / 2));
  for (int k = 1; k < n / 2; ++k) two_sided += 2.0 * std::norm(s.data(0, k));
  const double time_energy = (w.array() * x.array()).square().sum();
  EXPECT_NEAR(two_sided, n * time_energy, 1e-9 * n * time_energy);
}

TEST(Stft, RoundTripReconstructsInterior) {
  const Eigen::VectorXd x = random_signal(3, 80000);
  const Eigen::VectorXd y = istft(stft(x));
  ASSERT_EQ(y.size(), (311 - 1) * 256 + 512);
  // The first and last hop see only one window.
  const Eigen::Index start = 256, len = y.size() - 512;
  const double err = (y.segment(start, len) - x.segment(start, len)).norm() / x.segment(start, len).norm();
  EXPECT_LE(err, 1e-6);
}

TEST(Erb, RateMatchesGlasbergMoore) {
  // 21.4 log10(1 + 4.37) evaluated by hand: log10(5.37) = 0.729974...
  EXPECT_NEAR(erb_rate(1000.0), 15.6214, 1e-4);
  EXPECT_NEAR(erb_rate_to_hz(erb_rate(3210.0)), 3210.0, 1e-9);
  EXPECT_EQ(erb_rate(0.0), 0.0);
}

TEST(Erb, LayoutCoversTheBand) {
  const ErbFilterbank fb = build_erb_filterbank(32, 257, 16000.0);
  ASSERT_EQ(fb.bands(), 32);
  ASSERT_EQ(fb.bins(), 257);
  for (int b = 1; b < 32; ++b) EXPECT_GT(fb.centers_hz[b], fb.centers_hz[b - 1]);
  EXPECT_GT(fb.centers_hz[0], 0.0);
  EXPECT_LT(fb.centers_hz[31], 8000.0);
  EXPECT_GE(fb.weights.minCoeff(), 0.0);
  EXPECT_LE(fb.weights.maxCoeff(), 1.0);
  for (int f = 0; f < 257; ++f) EXPECT_NEAR(fb.bin_totals[f], 1.0, 1e-12) << "bin " << f;
  EXPECT_EQ(fb.weights(0, 0), 1.0);
  EXPECT_EQ(fb.weights(31, 256), 1.0);
}

TEST(Erb, NormalizerIsExactBandSum) {
  const ErbFilterbank fb = build_erb_filterbank(32, 257, 16000.0);
  for (int b = 0; b < 32; ++b) {
    double sum = 0.0;
    for (int f = 0; f < 257; ++f) sum += fb.weights(b, f);
    EXPECT_EQ(fb.normalizers[b], sum) << "band " << b;
  }
}

TEST(Erb, CompressionPreservesUnitBound) {
  const ErbFilterbank fb = build_erb_filterbank(32, 257, 16000.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(1000, 257);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  // Extreme rows hit the bound itself.
  x.row(0).setOnes();
  x.row(1).setConstant(-1.0);
  const Eigen::MatrixXd y = erb_compress(x, fb);
  EXPECT_LE(y.maxCoeff(), 1.0);
  EXPECT_GE(y.minCoeff(), -1.0);
  EXPECT_EQ(y.row(0).minCoeff(), 1.0);
  EXPECT_EQ(y.row(1).maxCoeff(), -1.0);
  const Eigen::MatrixXf yf = erb_compress(x.cast<float>(), fb);
  EXPECT_LE(yf.maxCoeff(), 1.0f);
  EXPECT_GE(yf.minCoeff(), -1.0f);
}

TEST(Erb, ExpandOfConstantBandsIsConstant) {
  const ErbFilterbank fb = build_erb_filterbank(32, 257, 16000.0);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Constant(3, 32, 0.7);
  const Eigen::MatrixXd expanded = erb_expand(g, fb);
  EXPECT_NEAR((expanded.array() - 0.7).abs().maxCoeff(), 0.0, 1e-15);
  // Round trip through compression leaves a constant unchanged.
  EXPECT_NEAR((erb_compress(expanded, fb).array() - 0.7).abs().maxCoeff(), 0.0, 1e-15);
  EXPECT_THROW(erb_expand(Eigen::MatrixXd::Zero(3, 31), fb), std::invalid_argument);
  EXPECT_THROW(erb_compress(Eigen::MatrixXd::Zero(3, 256), fb), std::invalid_argument);
}

TEST(Erb, ExpandMatchesExplicitWeightedAverage) {
  const ErbFilterbank fb = build_erb_filterbank(32, 257, 16000.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  Eigen::MatrixXd g(2, 32);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = u(rng);
  const Eigen::MatrixXd e = erb_expand(g, fb);
  for (int l = 0; l < 2; ++l) {
    for (int f = 0; f < 257; ++f) {
      double num = 0.0, den = 0.0;
      for (int b = 0; b < 32; ++b) {
        num += fb.weights(b, f) * g(l, b);
        den += fb.weights(b, f);
      }
      EXPECT_NEAR(e(l, f), num / den, 1e-14);
    }
  }
}

TEST(Erb, RejectsBandsWithoutBins) {
  EXPECT_THROW(build_erb_filterbank(40, 17, 16000.0), std::invalid_argument);
  EXPECT_THROW(build_erb_filterbank(1, 257, 16000.0), std::invalid_argument);
}

TEST(Convolve, FftPathMatchesDirectSum) {
  const Eigen::VectorXd a = random_signal(6, 1000);
  const Eigen::VectorXd b = random_signal(7, 300);
  const Eigen::VectorXd y = convolve(a, b);
  ASSERT_EQ(y.size(), 1299);
  double worst = 0.0;
  for (Eigen::Index n = 0; n < y.size(); ++n) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      if (n - k >= 0 && n - k < a.size()) acc += a[n - k] * b[k];
    }
    worst = std::max(worst, std::abs(acc - y[n]));
  }
  EXPECT_LE(worst, 1e-10);
  EXPECT_EQ(convolve(a, b, 500).size(), 500);
  EXPECT_NEAR((convolve(a, b, 500) - y.head(500)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

}  // namespace
}  // namespace batkit::dsp
