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

#include "batkit/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "batkit/dsp/convolve.hpp"
#include "batkit/error.hpp"
#include "batkit/scene/corpus.hpp"

namespace batkit::scene {
namespace {

constexpr std::uint64_t kNoiseSalt = 0xA11CE5EEDull;
constexpr int kMaxPlacementTries = 10000;

nlohmann::json vec_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Eigen::Vector3d vec_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

nlohmann::json sources_json(const std::vector<SourceSpec>& sources) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : sources) {
    out.push_back({{"azimuth", s.azimuth}, {"distance", s.distance}, {"signal_id", s.signal_id}});
  }
  return out;
}

std::vector<SourceSpec> sources_from(const nlohmann::json& j) {
  std::vector<SourceSpec> out;
  for (const auto& s : j) {
    out.push_back({s.at("azimuth").get<double>(), s.at("distance").get<double>(),
                   s.at("signal_id").get<std::string>()});
  }
  return out;
}

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double azimuth_gap(double a_deg, double b_deg) {
  double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return std::min(d, 360.0 - d);
}

void SceneSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("scene: alpha must lie in [0, 1]");
  if (speakers.empty()) throw std::invalid_argument("scene: at least one speaker is required");
  if (!(duration > 0.0)) throw std::invalid_argument("scene: duration must be positive");
  if (!(room.dimensions.array() > 0.0).all()) {
    throw std::invalid_argument("scene: room dimensions must be positive");
  }
  if (!(room.t60 >= 0.0 && room.t60 <= 1.5)) throw std::invalid_argument("scene: t60 outside [0, 1.5] s");
  std::vector<double> azimuths;
  for (const auto& s : speakers) azimuths.push_back(s.azimuth);
  for (const auto& s : interferers) azimuths.push_back(s.azimuth);
  for (std::size_t a = 0; a < azimuths.size(); ++a) {
    for (std::size_t b = a + 1; b < azimuths.size(); ++b) {
      if (azimuth_gap(azimuths[a], azimuths[b]) < kMinSeparationDeg) {
        throw std::invalid_argument("scene: sources closer than 30 degrees in azimuth");
      }
    }
  }
}

nlohmann::json scene_to_json(const SceneSpec& spec) {
  return {{"room",
           {{"dimensions", vec_json(spec.room.dimensions)},
            {"t60", spec.room.t60},
            {"array_center", vec_json(spec.room.array_center)},
            {"array_yaw", spec.room.array_yaw}}},
          {"speakers", sources_json(spec.speakers)},
          {"interferers", sources_json(spec.interferers)},
          {"sir", spec.sir},
          {"snr", spec.snr},
          {"alpha", spec.alpha},
          {"seed", spec.seed},
          {"duration", spec.duration}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec spec;
  try {
    const auto& room = j.at("room");
    spec.room.dimensions = vec_from(room.at("dimensions"));
    spec.room.t60 = room.at("t60").get<double>();
    spec.room.array_center = vec_from(room.at("array_center"));
    spec.room.array_yaw = room.value("array_yaw", 0.0);
    spec.speakers = sources_from(j.at("speakers"));
    spec.interferers = sources_from(j.value("interferers", nlohmann::json::array()));
    spec.sir = j.value("sir", 10.0);
    spec.snr = j.value("snr", 25.0);
    spec.alpha = j.value("alpha", 1.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.duration = j.value("duration", 5.0);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene spec: ") + e.what());
  }
  return spec;
}

std::vector<Eigen::Vector3d> mic_world_positions(const RoomSpec& room,
                                                 const ArrayGeometry& geometry) {
  const Eigen::Matrix3d yaw =
      Eigen::AngleAxisd(room.array_yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  std::vector<Eigen::Vector3d> out;
  for (const auto& p : geometry.mic_positions) out.push_back(room.array_center + yaw * p);
  return out;
}

Eigen::Vector3d source_world_position(const RoomSpec& room, const SourceSpec& source) {
  const double phi = source.azimuth * std::numbers::pi / 180.0 + room.array_yaw;
  return room.array_center +
         source.distance * Eigen::Vector3d(std::cos(phi), std::sin(phi), 0.0);
}

BinauralPair blend_target(const BinauralPair& clean, const BinauralPair& ambience, double alpha) {
  return {clean.left + alpha * ambience.left, clean.right + alpha * ambience.right};
}

SceneMix mix_scene(const SceneSpec& spec, const ArrayGeometry& geometry, const HrirSet& hrirs) {
  spec.validate();
  geometry.validate();
  const double fs = kSampleRate;
  if (hrirs.sample_rate != fs) throw std::invalid_argument("mix_scene: HRIR sample-rate mismatch");
  const auto n = static_cast<Eigen::Index>(std::llround(spec.duration * fs));
  const int mics = geometry.mic_count();
  const int ref = geometry.reference_index;

  const auto mic_pos = mic_world_positions(spec.room, geometry);
  for (const auto& p : mic_pos) {
    if (!spec.room.contains(p)) throw std::invalid_argument("mix_scene: array extends outside the room");
  }

  struct Source {
    const SourceSpec* spec;
    std::vector<Rir> rirs;
    Signal signal;
    double gain = 1.0;
  };
  const auto prepare = [&](const SourceSpec& s) {
    Source src{&s, {}, resolve_signal(s.signal_id, n, fs)};
    const Eigen::Vector3d pos = source_world_position(spec.room, s);
    if (!spec.room.contains(pos)) {
      throw std::invalid_argument("mix_scene: source '" + s.signal_id + "' lies outside the room");
    }
    for (int m = 0; m < mics; ++m) src.rirs.push_back(simulate_rir(spec.room, pos, mic_pos[m], fs));
    return src;
  };
  std::vector<Source> speakers, interferers;
  for (const auto& s : spec.speakers) speakers.push_back(prepare(s));
  for (const auto& s : spec.interferers) interferers.push_back(prepare(s));

  SceneMix mix;
  mix.speech_ref = Signal::Zero(n);
  for (auto& s : speakers) {
    const Signal image = dsp::convolve(s.rirs[ref].taps, s.signal, n);
    const double power = dsp::mean_power(image);
    if (!(power > 0.0)) {
      throw std::invalid_argument("mix_scene: speaker '" + s.spec->signal_id + "' has zero power");
    }
    s.gain = std::sqrt(kSpeakerPower / power);
    mix.speech_ref += s.gain * image;
  }
  const double speech_power = dsp::mean_power(mix.speech_ref);
  if (!(speech_power > 0.0)) throw std::invalid_argument("mix_scene: speech sums to zero power");

  mix.interferer_ref = Signal::Zero(n);
  if (!interferers.empty()) {
    Signal raw = Signal::Zero(n);
    for (const auto& s : interferers) raw += dsp::convolve(s.rirs[ref].taps, s.signal, n);
    const double power = dsp::mean_power(raw);
    if (!(power > 0.0)) throw std::invalid_argument("mix_scene: interferers have zero power");
    const double gain = std::sqrt(speech_power / (power * db_to_power(spec.sir)));
    for (auto& s : interferers) s.gain = gain;
    mix.interferer_ref = gain * raw;
  }

  mix.mics = MultiSignal::Zero(n, mics);
  for (int m = 0; m < mics; ++m) {
    if (m == ref) {
      mix.mics.col(m) = mix.speech_ref + mix.interferer_ref;
      continue;
    }
    for (const auto* group : {&speakers, &interferers}) {
      for (const auto& s : *group) {
        mix.mics.col(m) += s.gain * dsp::convolve(s.rirs[m].taps, s.signal, n);
      }
    }
  }

  std::mt19937_64 rng(spec.seed ^ kNoiseSalt);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MultiSignal noise(n, mics);
  for (int m = 0; m < mics; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) noise(i, m) = gauss(rng);
  }
  const double clean_power = dsp::mean_power(mix.mics.col(ref));
  const double noise_gain =
      std::sqrt(clean_power / (db_to_power(spec.snr) * dsp::mean_power(noise.col(ref))));
  noise *= noise_gain;
  mix.noise_ref = noise.col(ref);
  mix.mics += noise;

  mix.clean = {Signal::Zero(n), Signal::Zero(n)};
  mix.ambience = {Signal::Zero(n), Signal::Zero(n)};
  for (const auto& s : speakers) {
    const RirSplit split = split_clean_late(s.rirs[ref], kEarlyMs, kCleanT60);
    const HrirPair& h = hrirs.nearest(s.spec->azimuth);
    const Signal src = s.gain * s.signal;
    mix.clean.left += dsp::convolve(dsp::convolve(h.left, split.clean.taps), src, n);
    mix.clean.right += dsp::convolve(dsp::convolve(h.right, split.clean.taps), src, n);
    mix.ambience.left += dsp::convolve(dsp::convolve(h.left, split.late.taps), src, n);
    mix.ambience.right += dsp::convolve(dsp::convolve(h.right, split.late.taps), src, n);
  }
  for (const auto& s : interferers) {
    const HrirPair& h = hrirs.nearest(s.spec->azimuth);
    const Signal src = s.gain * s.signal;
    mix.ambience.left += dsp::convolve(dsp::convolve(h.left, s.rirs[ref].taps), src, n);
    mix.ambience.right += dsp::convolve(dsp::convolve(h.right, s.rirs[ref].taps), src, n);
  }
  mix.target = blend_target(mix.clean, mix.ambience, spec.alpha);
  return mix;
}

SceneSpec sample_scene(std::uint64_t seed, const SceneRanges& ranges) {
  if (ranges.t60_choices.empty() || ranges.sir_choices.empty() || ranges.snr_choices.empty() ||
      ranges.alpha_choices.empty() || ranges.speakers < 1 || ranges.interferers < 0 ||
      ranges.speech_pool < ranges.speakers || (ranges.interferers > 0 && ranges.music_pool < 1)) {
    throw std::invalid_argument("sample_scene: empty or inconsistent ranges");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  const auto pick = [&](const std::vector<double>& choices) {
    std::uniform_int_distribution<std::size_t> index(0, choices.size() - 1);
    return choices[index(rng)];
  };

  SceneSpec spec;
  spec.seed = seed;
  spec.duration = ranges.duration;
  for (int a = 0; a < 3; ++a) {
    spec.room.dimensions[a] = between(ranges.room_min[a], ranges.room_max[a]);
  }
  spec.room.t60 = pick(ranges.t60_choices);
  spec.room.array_center = {
      spec.room.dimensions.x() / 2 + between(-ranges.center_jitter, ranges.center_jitter),
      spec.room.dimensions.y() / 2 + between(-ranges.center_jitter, ranges.center_jitter),
      std::min(ranges.array_height, spec.room.dimensions.z() - ranges.wall_margin)};
  spec.room.array_yaw = between(0.0, 2.0 * std::numbers::pi);
  spec.sir = pick(ranges.sir_choices);
  spec.snr = pick(ranges.snr_choices);
  spec.alpha = pick(ranges.alpha_choices);

  const int total = ranges.speakers + ranges.interferers;
  std::vector<SourceSpec> placed(total);
  bool accepted = false;
  for (int attempt = 0; attempt < kMaxPlacementTries && !accepted; ++attempt) {
    for (auto& s : placed) {
      s.azimuth = between(ranges.azimuth_min, ranges.azimuth_max);
      s.distance = between(ranges.distance_min, ranges.distance_max);
    }
    accepted = true;
    for (int a = 0; a < total && accepted; ++a) {
      const Eigen::Vector3d pos = source_world_position(spec.room, placed[a]);
      const bool inside =
          (pos.array() > ranges.wall_margin).all() &&
          (pos.array() < (spec.room.dimensions.array() - ranges.wall_margin)).all();
      if (!inside) accepted = false;
      for (int b = a + 1; b < total && accepted; ++b) {
        if (azimuth_gap(placed[a].azimuth, placed[b].azimuth) < kMinSeparationDeg) accepted = false;
      }
    }
  }
  if (!accepted) {
    throw std::invalid_argument("sample_scene: no valid placement after 10000 tries");
  }

  std::vector<int> speech_ids(ranges.speech_pool);
  for (int i = 0; i < ranges.speech_pool; ++i) speech_ids[i] = i;
  for (int d = 0; d < ranges.speakers; ++d) {
    std::uniform_int_distribution<int> index(d, ranges.speech_pool - 1);
    std::swap(speech_ids[d], speech_ids[index(rng)]);
    placed[d].signal_id = "speech:" + std::to_string(speech_ids[d]);
    spec.speakers.push_back(placed[d]);
  }
  std::uniform_int_distribution<int> music(0, std::max(0, ranges.music_pool - 1));
  for (int k = 0; k < ranges.interferers; ++k) {
    placed[ranges.speakers + k].signal_id = "music:" + std::to_string(music(rng));
    spec.interferers.push_back(placed[ranges.speakers + k]);
  }
  return spec;
}

}  // namespace batkit::scene
