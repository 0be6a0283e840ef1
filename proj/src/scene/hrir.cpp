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

#include "batkit/scene/hrir.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "batkit/error.hpp"
#include "batkit/io/wav.hpp"

namespace batkit::scene {
namespace {

constexpr int kSincTaps = 16;
constexpr double kMaxAzimuthGap = 45.0;
constexpr std::size_t kMinAzimuths = 12;

double wrap_degrees(double az) {
  double w = std::fmod(az, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

double circular_gap(double a, double b) {
  const double d = std::abs(wrap_degrees(a) - wrap_degrees(b));
  return std::min(d, 360.0 - d);
}

// Folds the azimuth onto the left half-plane [0, 180]; `right` is set when
// the source lies on the right side.
double fold(double azimuth_deg, bool& right) {
  const double az = wrap_degrees(azimuth_deg);
  right = az > 180.0;
  return right ? 360.0 - az : az;
}

double lateral_angle(double folded_deg) {
  return std::asin(std::sin(folded_deg * std::numbers::pi / 180.0));
}

Eigen::VectorXd fractional_impulse(double delay, int length) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(length);
  const auto first = static_cast<long>(std::floor(delay)) - (kSincTaps / 2 - 1);
  for (int k = 0; k < kSincTaps; ++k) {
    const long n = first + k;
    if (n < 0 || n >= length) continue;
    const double t = static_cast<double>(n) - delay;
    const double sinc =
        std::abs(t) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double window = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t / kSincTaps));
    h[n] = sinc * window;
  }
  return h;
}

Eigen::VectorXd one_pole(const Eigen::VectorXd& x, double pole) {
  Eigen::VectorXd y(x.size());
  double state = 0.0;
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    state = (1.0 - pole) * x[n] + pole * state;
    y[n] = state;
  }
  return y;
}

}  // namespace

const HrirPair& HrirSet::nearest(double azimuth_deg) const {
  if (entries.empty()) throw std::invalid_argument("HrirSet::nearest: empty set");
  const HrirPair* best = nullptr;
  double best_gap = 1e9;
  for (const auto& [az, pair] : entries) {
    const double gap = circular_gap(az, azimuth_deg);
    if (gap < best_gap) {
      best_gap = gap;
      best = &pair;
    }
  }
  return *best;
}

double woodworth_itd(double azimuth_deg, const SphericalHead& head) {
  bool right = false;
  const double theta = lateral_angle(fold(azimuth_deg, right));
  return head.radius / head.sound_speed * (theta + std::sin(theta));
}

HrirPair synth_hrir(double azimuth_deg, const SphericalHead& head) {
  bool right = false;
  const double folded = fold(azimuth_deg, right);
  const double theta = lateral_angle(folded);
  const double itd = head.radius / head.sound_speed * (theta + std::sin(theta));

  const Eigen::VectorXd near_ear = fractional_impulse(head.base_delay, head.length);
  const Eigen::VectorXd far_ear =
      one_pole(fractional_impulse(head.base_delay + itd * head.sample_rate, head.length),
               head.shadow_pole * std::sin(theta));
  if (right) return {far_ear, near_ear};
  return {near_ear, far_ear};
}

HrirSet synthetic_hrir_set(double step_deg, const SphericalHead& head) {
  if (step_deg <= 0.0 || step_deg > 30.0) {
    throw std::invalid_argument("synthetic_hrir_set: step must be in (0, 30] degrees");
  }
  HrirSet set;
  set.sample_rate = head.sample_rate;
  const int count = static_cast<int>(std::lround(360.0 / step_deg));
  for (int i = 0; i < count; ++i) {
    const double az = i * 360.0 / count;
    set.entries.emplace(az, synth_hrir(az, head));
  }
  return set;
}

HrirSet load_hrir_set(const std::filesystem::path& index_path, double expected_rate) {
  std::ifstream in(index_path);
  if (!in) throw NotFoundError("HRIR index not found: " + index_path.string());
  nlohmann::json index;
  try {
    in >> index;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(index_path.string() + ": " + e.what());
  }
  if (!index.is_object()) throw FormatError(index_path.string() + ": index must be an object");

  const auto base = index_path.parent_path();
  HrirSet set;
  set.sample_rate = expected_rate;
  Eigen::Index length = -1;
  for (const auto& [key, entry] : index.items()) {
    double az = 0.0;
    try {
      az = std::stod(key);
    } catch (const std::exception&) {
      throw FormatError("HRIR index entry '" + key + "': azimuth is not a number");
    }
    if (!entry.is_object() || !entry.contains("left") || !entry.contains("right")) {
      throw FormatError("HRIR index entry '" + key + "': needs left and right paths");
    }
    HrirPair pair;
    for (const char* ear : {"left", "right"}) {
      const auto path = base / entry.at(ear).get<std::string>();
      io::Wav wav;
      try {
        wav = io::read_wav(path);
      } catch (const NotFoundError&) {
        throw FormatError("HRIR index entry '" + key + "': missing file " + path.string());
      }
      if (wav.sample_rate != static_cast<int>(expected_rate)) {
        throw FormatError("HRIR index entry '" + key + "': sample-rate mismatch (" +
                          std::to_string(wav.sample_rate) + " Hz in " + path.string() + ")");
      }
      if (wav.channels() != 1) {
        throw FormatError("HRIR index entry '" + key + "': " + path.string() + " is not mono");
      }
      if (length < 0) length = wav.frames();
      if (wav.frames() != length) {
        throw FormatError("HRIR index entry '" + key + "': length mismatch in " + path.string());
      }
      (std::string(ear) == "left" ? pair.left : pair.right) = wav.samples.col(0);
    }
    set.entries.emplace(wrap_degrees(az), std::move(pair));
  }
  if (set.entries.size() < kMinAzimuths) {
    throw FormatError(index_path.string() + ": need at least 12 azimuths, found " +
                      std::to_string(set.entries.size()));
  }
  double prev = std::prev(set.entries.end())->first - 360.0;
  for (const auto& [az, pair] : set.entries) {
    if (az - prev > kMaxAzimuthGap) {
      throw FormatError(index_path.string() + ": azimuth gap before " + std::to_string(az) +
                        " exceeds 45 degrees");
    }
    prev = az;
  }
  return set;
}

void save_hrir_set(const std::filesystem::path& dir, const HrirSet& set) {
  std::filesystem::create_directories(dir);
  nlohmann::json index = nlohmann::json::object();
  for (const auto& [az, pair] : set.entries) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "az%06.2f", az);
    const std::string left = std::string(stem) + "_L.wav";
    const std::string right = std::string(stem) + "_R.wav";
    io::write_wav(dir / left, MultiSignal(pair.left), static_cast<int>(set.sample_rate));
    io::write_wav(dir / right, MultiSignal(pair.right), static_cast<int>(set.sample_rate));
    char key[32];
    std::snprintf(key, sizeof(key), "%g", az);
    index[key] = {{"left", left}, {"right", right}};
  }
  std::ofstream out(dir / "index.json");
  if (!out) throw IoError("cannot write HRIR index in " + dir.string());
  out << index.dump(2) << '\n';
}

}  // namespace batkit::scene
