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

#include "batkit/score/score.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace batkit::score {
namespace {

void check_geometry(std::span<const dsp::Spectrogram> specs) {
  if (specs.size() < 2) throw std::invalid_argument("SCORE needs at least two channels");
  for (const auto& s : specs) {
    if (s.frames() != specs[0].frames() || s.bins() != specs[0].bins()) {
      throw std::invalid_argument("SCORE: spectrogram geometry differs between channels");
    }
  }
}

}  // namespace

RtfFrame short_term_rtf(std::span<const dsp::Spectrogram> specs, Eigen::Index frame, int radius) {
  check_geometry(specs);
  const auto& ref = specs[0].data;
  const Eigen::Index first = std::max<Eigen::Index>(0, frame - radius);
  const Eigen::Index last = std::min<Eigen::Index>(ref.rows() - 1, frame + radius);
  const auto channels = static_cast<Eigen::Index>(specs.size());

  RtfFrame rtf;
  rtf.radius = radius;
  rtf.values.resize(channels - 1, ref.cols());
  for (Eigen::Index f = 0; f < ref.cols(); ++f) {
    double denom = 0.0;
    for (Eigen::Index n = first; n <= last; ++n) denom += std::norm(ref(n, f));
    denom += kEpsilon;
    for (Eigen::Index m = 1; m < channels; ++m) {
      Complex num = 0.0;
      for (Eigen::Index n = first; n <= last; ++n) {
        num += specs[m].data(n, f) * std::conj(ref(n, f));
      }
      rtf.values(m - 1, f) = num / denom;
    }
  }
  return rtf;
}

Eigen::MatrixXcd whiten_delete(const RtfFrame& rtf) {
  return rtf.values.unaryExpr([](const Complex& r) {
    const double mag = std::abs(r);
    return mag < kEpsilon ? Complex(1.0, 0.0) : r / mag;
  });
}

SteeringMatrix build_steering(const scene::ArrayGeometry& geometry, int looks, int bins,
                              double sample_rate) {
  geometry.validate();
  if (looks < 1) throw std::invalid_argument("build_steering: need at least one look direction");
  if (bins < 2) throw std::invalid_argument("build_steering: need at least two bins");
  const auto order = geometry.channel_order();
  const Eigen::Vector3d& ref = geometry.mic_positions[order[0]];
  const int others = geometry.mic_count() - 1;
  const int frame_size = 2 * (bins - 1);

  SteeringMatrix A;
  for (int q = 0; q < looks; ++q) A.look_directions.push_back(360.0 * q / looks);

  Eigen::MatrixXd delays(others, looks);  // seconds
  for (int q = 0; q < looks; ++q) {
    const double theta = A.look_directions[q] * std::numbers::pi / 180.0;
    const Eigen::Vector3d u(std::cos(theta), std::sin(theta), 0.0);
    for (int m = 0; m < others; ++m) {
      delays(m, q) = u.dot(ref - geometry.mic_positions[order[m + 1]]) / A.sound_speed;
    }
  }
  A.per_bin.reserve(bins);
  for (int f = 0; f < bins; ++f) {
    const double hz = static_cast<double>(f) * sample_rate / frame_size;
    A.per_bin.push_back(delays.unaryExpr([hz](double tau) {
      return std::polar(1.0, -2.0 * std::numbers::pi * hz * tau);
    }));
  }
  return A;
}

Eigen::VectorXd score_vector(const Eigen::Ref<const Eigen::VectorXcd>& whitened,
                             const Eigen::MatrixXcd& steering) {
  if (whitened.size() != steering.rows()) {
    throw std::invalid_argument("score_vector: vector length " + std::to_string(whitened.size()) +
                                " does not match steering rows " +
                                std::to_string(steering.rows()));
  }
  return (steering.adjoint() * whitened).real() / static_cast<double>(whitened.size());
}

Eigen::MatrixXd score_frame(std::span<const dsp::Spectrogram> specs, Eigen::Index frame,
                            const SteeringMatrix& steering, int radius) {
  const Eigen::MatrixXcd whitened = whiten_delete(short_term_rtf(specs, frame, radius));
  if (static_cast<Eigen::Index>(steering.per_bin.size()) != whitened.cols()) {
    throw std::invalid_argument("score_frame: steering bins do not match spectrogram");
  }
  Eigen::MatrixXd out(whitened.cols(), steering.looks());
  for (Eigen::Index f = 0; f < whitened.cols(); ++f) {
    out.row(f) = score_vector(whitened.col(f), steering.per_bin[f]).transpose();
  }
  return out;
}

ScoreFeature extract_score(std::span<const dsp::Spectrogram> specs,
                           const scene::ArrayGeometry& geometry, const dsp::ErbFilterbank& fb,
                           const ScoreParams& params) {
  geometry.validate();
  if (static_cast<int>(specs.size()) != geometry.mic_count()) {
    throw std::invalid_argument("extract_score: " + std::to_string(specs.size()) +
                                " channels but geometry has " +
                                std::to_string(geometry.mic_count()) + " mics");
  }
  std::vector<dsp::Spectrogram> ordered;
  for (int m : geometry.channel_order()) ordered.push_back(specs[m]);
  check_geometry(ordered);
  const Eigen::Index frames = ordered[0].frames();
  const auto bins = static_cast<int>(ordered[0].bins());
  if (bins != fb.bins()) throw std::invalid_argument("extract_score: filterbank bin count mismatch");

  const SteeringMatrix steering =
      build_steering(geometry, params.looks, bins, ordered[0].sample_rate);
  const auto bands = static_cast<int>(fb.bands());

  ScoreFeature feat;
  feat.bands = bands;
  feat.looks = params.looks;
  feat.score.resize(frames, static_cast<Eigen::Index>(bands) * params.looks);
  for (Eigen::Index l = 0; l < frames; ++l) {
    const Eigen::MatrixXd zeta = score_frame(ordered, l, steering, params.radius);
    const Eigen::MatrixXd compressed = dsp::erb_compress(zeta.transpose(), fb);  // Q x bands
    for (int b = 0; b < bands; ++b) {
      for (int q = 0; q < params.looks; ++q) feat.score(l, b * params.looks + q) = compressed(q, b);
    }
  }

  const Eigen::MatrixXd power = ordered[0].data.cwiseAbs2();
  Eigen::MatrixXd logspec =
      dsp::erb_compress(power, fb).unaryExpr([](double p) { return std::log10(kEpsilon + p); });
  const double mean = logspec.mean();
  logspec.array() -= mean;
  const double var = logspec.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, logspec.size()));
  if (var > 0.0) logspec /= std::sqrt(var);
  feat.ref_logspec = logspec;
  return feat;
}

ScoreFeature extract_score(const MultiSignal& mics, const scene::ArrayGeometry& geometry,
                           const dsp::ErbFilterbank& fb, const ScoreParams& params) {
  if (mics.cols() != geometry.mic_count()) {
    throw std::invalid_argument("extract_score: " + std::to_string(mics.cols()) +
                                " channels but geometry has " +
                                std::to_string(geometry.mic_count()) + " mics");
  }
  std::vector<dsp::Spectrogram> specs;
  for (Eigen::Index m = 0; m < mics.cols(); ++m) specs.push_back(dsp::stft(mics.col(m)));
  return extract_score(specs, geometry, fb, params);
}

}  // namespace batkit::score
