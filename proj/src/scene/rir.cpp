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

#include "batkit/scene/rir.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace batkit::scene {
namespace {

constexpr int kSincTaps = 16;
constexpr double kHighPassHz = 50.0;

struct AxisImage {
  double coordinate;
  int reflections;
};

// Image coordinates along one axis within `radius` of the mic:
// x = (1 - 2u) s + 2 n L with |2n - u| reflections.
std::vector<AxisImage> axis_images(double source, double length, double mic, double radius) {
  std::vector<AxisImage> out;
  const int n_max = static_cast<int>(std::ceil(radius / (2.0 * length))) + 1;
  for (int n = -n_max; n <= n_max; ++n) {
    for (int u = 0; u <= 1; ++u) {
      const double x = (1 - 2 * u) * source + 2.0 * n * length;
      if (std::abs(x - mic) > radius) continue;
      out.push_back({x - mic, std::abs(2 * n - u)});
    }
  }
  return out;
}

// Least-squares decay time of a backward-integrated energy curve sampled
// every `dt` seconds, fitted between -5 and -25 dB.
double decay_time(const std::vector<double>& edc, double dt) {
  const double total = edc.empty() ? 0.0 : edc[0];
  if (!(total > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  std::size_t start = edc.size(), stop = edc.size();
  for (std::size_t i = 0; i < edc.size(); ++i) {
    const double db = 10.0 * std::log10(edc[i] / total);
    if (start == edc.size() && db <= -5.0) start = i;
    if (db <= -25.0) {
      stop = i;
      break;
    }
  }
  if (start == edc.size() || stop == edc.size() || stop <= start) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double count = static_cast<double>(stop - start + 1);
  for (std::size_t i = start; i <= stop; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double y = 10.0 * std::log10(edc[i] / total);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double slope = (count * sty - st * sy) / (count * stt - st * st);
  return -60.0 / slope;
}

struct Image {
  double distance;
  int reflections;
};

// Sabine assumes a diffuse field, which a shoebox with uniform walls is not;
// flat rooms decay too slowly. The absorption is instead bisected until the
// Schroeder decay of the image energies beta^2k / d^2 matches t60.
double calibrated_reflection(const std::vector<Image>& images, double t60) {
  constexpr double kBinSeconds = 1e-3;
  constexpr int kIterations = 40;
  int max_k = 0;
  double max_d = 0.0;
  for (const Image& img : images) {
    max_k = std::max(max_k, img.reflections);
    max_d = std::max(max_d, img.distance);
  }
  if (max_k == 0) return 0.0;
  const double bin_metres = kBinSeconds * kSoundSpeed;
  const auto bins = static_cast<std::size_t>(max_d / bin_metres) + 1;
  const auto orders = static_cast<std::size_t>(max_k) + 1;
  std::vector<double> hist(bins * orders, 0.0);
  for (const Image& img : images) {
    const auto b = static_cast<std::size_t>(img.distance / bin_metres);
    hist[b * orders + img.reflections] += 1.0 / (img.distance * img.distance);
  }

  std::vector<double> power(orders), edc(bins);
  const auto decay = [&](double absorption) {
    const double energy_ratio = 1.0 - absorption;  // beta^2
    power[0] = 1.0;
    for (std::size_t k = 1; k < orders; ++k) power[k] = power[k - 1] * energy_ratio;
    double acc = 0.0;
    for (std::size_t b = bins; b-- > 0;) {
      const double* row = &hist[b * orders];
      for (std::size_t k = 0; k < orders; ++k) acc += row[k] * power[k];
      edc[b] = acc;
    }
    const double t = decay_time(edc, kBinSeconds);
    return std::isnan(t) ? 0.0 : t;
  };

  double lo = 1e-6, hi = 1.0;  // decay time falls as absorption rises
  for (int i = 0; i < kIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (decay(mid) > t60 ? lo : hi) = mid;
  }
  return std::sqrt(1.0 - 0.5 * (lo + hi));
}

// Second-order Butterworth high-pass, applied in place. All images are
// positive pulses, so without it their dense late overlap piles up at DC.
void high_pass(Eigen::VectorXd& x, double cutoff_hz, double sample_rate) {
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double alpha = std::sin(w0) / std::numbers::sqrt2;
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha;
  const double b0 = (1.0 + cw) / 2.0 / a0, b1 = -(1.0 + cw) / a0, b2 = b0;
  const double a1 = -2.0 * cw / a0, a2 = (1.0 - alpha) / a0;
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double y = b0 * x[n] + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x[n];
    y2 = y1;
    y1 = y;
    x[n] = y;
  }
}

}  // namespace

bool RoomSpec::contains(const Eigen::Vector3d& p) const {
  return (p.array() > 0.0).all() && (p.array() < dimensions.array()).all();
}

double reflection_coefficient(const RoomSpec& room) {
  if (room.t60 <= 0.0) return 0.0;
  const Eigen::Vector3d& d = room.dimensions;
  const double volume = d.prod();
  const double surface = 2.0 * (d.x() * d.y() + d.y() * d.z() + d.x() * d.z());
  const double absorption = std::min(1.0, 0.161 * volume / (surface * room.t60));
  return std::sqrt(1.0 - absorption);
}

Rir simulate_rir(const RoomSpec& room, const Eigen::Vector3d& source_pos,
                 const Eigen::Vector3d& mic_pos, double sample_rate) {
  if (!(room.dimensions.array() > 0.0).all()) {
    throw std::invalid_argument("simulate_rir: room dimensions must be positive");
  }
  if (room.t60 < 0.0) throw std::invalid_argument("simulate_rir: negative t60");
  if (!room.contains(source_pos)) throw std::invalid_argument("simulate_rir: source outside room");
  if (!room.contains(mic_pos)) throw std::invalid_argument("simulate_rir: mic outside room");

  if (reflection_coefficient(room) >= 1.0) throw std::invalid_argument("simulate_rir: lossless room");
  // Every image arriving before t60 is kept, whatever its order.
  const double direct = (source_pos - mic_pos).norm();
  const double radius = std::max(direct, room.t60 * kSoundSpeed);

  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    axes[a] = axis_images(source_pos[a], room.dimensions[a], mic_pos[a], radius);
  }
  std::vector<Image> images;
  const double radius_sq = radius * radius;
  for (const auto& ix : axes[0]) {
    const double dx2 = ix.coordinate * ix.coordinate;
    for (const auto& iy : axes[1]) {
      const double dxy2 = dx2 + iy.coordinate * iy.coordinate;
      if (dxy2 > radius_sq) continue;
      const int kxy = ix.reflections + iy.reflections;
      for (const auto& iz : axes[2]) {
        const double d2 = dxy2 + iz.coordinate * iz.coordinate;
        if (d2 > radius_sq) continue;
        images.push_back({std::sqrt(d2), kxy + iz.reflections});
      }
    }
  }
  if (room.t60 == 0.0) {
    images.erase(std::remove_if(images.begin(), images.end(),
                                [](const Image& img) { return img.reflections > 0; }),
                 images.end());
  }
  const double beta = room.t60 == 0.0 ? 0.0 : calibrated_reflection(images, room.t60);
  int max_reflections = 0;
  double max_distance = 0.0;
  for (const Image& img : images) {
    max_reflections = std::max(max_reflections, img.reflections);
    max_distance = std::max(max_distance, img.distance);
  }
  std::vector<double> beta_pow(max_reflections + 1, 1.0);
  for (int k = 1; k <= max_reflections; ++k) beta_pow[k] = beta_pow[k - 1] * beta;
  const double samples_per_metre = sample_rate / kSoundSpeed;
  const double max_delay = max_distance * samples_per_metre;

  Rir rir;
  rir.sample_rate = sample_rate;
  rir.direct_delay = direct * samples_per_metre;
  const auto length = static_cast<Eigen::Index>(std::floor(max_delay)) + kSincTaps / 2 + 1;
  rir.taps = Eigen::VectorXd::Zero(length);

  std::array<double, kSincTaps> cos_step, sin_step;
  for (int k = 0; k < kSincTaps; ++k) {
    cos_step[k] = std::cos(2.0 * std::numbers::pi * k / kSincTaps);
    sin_step[k] = std::sin(2.0 * std::numbers::pi * k / kSincTaps);
  }
  for (const Image& img : images) {
    const double amplitude = beta_pow[img.reflections] / (4.0 * std::numbers::pi * img.distance);
    if (amplitude == 0.0) continue;
    const double delay = img.distance * samples_per_metre;
    const auto first = static_cast<Eigen::Index>(std::floor(delay)) - (kSincTaps / 2 - 1);
    const double t0 = static_cast<double>(first) - delay;  // in (-8, -7]
    const double sin0 = std::sin(std::numbers::pi * t0);
    const double phase0 = 2.0 * std::numbers::pi * t0 / kSincTaps;
    const double c0 = std::cos(phase0), s0 = std::sin(phase0);
    for (int k = 0; k < kSincTaps; ++k) {
      const Eigen::Index n = first + k;
      if (n < 0) continue;
      const double t = t0 + k;
      double sinc;
      if (std::abs(t) < 1e-12) {
        sinc = 1.0;
      } else {
        const double s = (k % 2 == 0) ? sin0 : -sin0;  // sin(pi (t0 + k))
        sinc = s / (std::numbers::pi * t);
      }
      const double cos_t = c0 * cos_step[k] - s0 * sin_step[k];
      const double window = 0.5 * (1.0 + cos_t);
      rir.taps[n] += amplitude * sinc * window;
    }
  }
  if (images.size() > 1) high_pass(rir.taps, kHighPassHz, sample_rate);
  return rir;
}

RirSplit split_clean_late(const Rir& rir, double early_ms, double target_t60) {
  if (rir.taps.size() == 0) throw std::invalid_argument("split_clean_late: empty rir");
  if (early_ms < 0.0) throw std::invalid_argument("split_clean_late: negative early_ms");
  if (target_t60 <= 0.0) throw std::invalid_argument("split_clean_late: target_t60 must be positive");

  const double early_end = rir.direct_delay + early_ms * 1e-3 * rir.sample_rate;
  const double decay_samples = target_t60 * rir.sample_rate;
  RirSplit split;
  split.clean = rir;
  split.late = rir;
  for (Eigen::Index n = 0; n < rir.taps.size(); ++n) {
    const double t = static_cast<double>(n);
    const double env =
        t <= early_end ? 1.0 : std::min(1.0, std::pow(10.0, -3.0 * (t - early_end) / decay_samples));
    split.clean.taps[n] = rir.taps[n] * env;
    split.late.taps[n] = rir.taps[n] - split.clean.taps[n];
  }
  return split;
}

double schroeder_t60(const Eigen::Ref<const Eigen::VectorXd>& taps, double sample_rate) {
  std::vector<double> edc(static_cast<std::size_t>(taps.size()));
  double acc = 0.0;
  for (Eigen::Index i = taps.size() - 1; i >= 0; --i) {
    acc += taps[i] * taps[i];
    edc[static_cast<std::size_t>(i)] = acc;
  }
  return decay_time(edc, 1.0 / sample_rate);
}

}  // namespace batkit::scene
