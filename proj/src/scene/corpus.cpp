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

#include "batkit/scene/corpus.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "batkit/error.hpp"
#include "batkit/io/wav.hpp"

namespace batkit::scene {
namespace {

constexpr double kTargetRms = 0.1;
constexpr std::uint64_t kSpeechSalt = 0x5eec4u;
constexpr std::uint64_t kMusicSalt = 0x3a5f1cu;

void normalize_rms(Signal& x) {
  const double rms = std::sqrt(x.squaredNorm() / std::max<Eigen::Index>(1, x.size()));
  if (rms > 0.0) x *= kTargetRms / rms;
}

// Two-pole resonator with roughly unit gain at its centre frequency.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;

  double step(double x, double freq, double bandwidth, double fs) {
    const double r = std::exp(-std::numbers::pi * bandwidth / fs);
    const double theta = 2.0 * std::numbers::pi * freq / fs;
    const double a1 = 2.0 * r * std::cos(theta);
    const double a2 = -r * r;
    const double gain =
        (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
    const double y = gain * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

std::uint64_t parse_index(const std::string& id, std::size_t prefix) {
  const std::string digits = id.substr(prefix);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw NotFoundError("unknown signal id: " + id);
  }
  return std::stoull(digits);
}

}  // namespace

Signal speech_like(std::uint64_t seed, Eigen::Index samples, double fs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };

  const double base_f0 = between(90.0, 220.0);
  const double intonation_rate = between(0.3, 1.2);
  const double intonation_phase = between(0.0, 2.0 * std::numbers::pi);

  Signal out = Signal::Zero(samples);
  std::array<Resonator, 3> formants;
  std::array<double, 3> current{500.0, 1500.0, 2500.0};
  std::array<double, 3> target = current;
  constexpr std::array<double, 3> kBandwidth{80.0, 100.0, 140.0};

  double phase = 0.0;
  Eigen::Index n = 0;
  double prev_excitation = 0.0;
  while (n < samples) {
    const bool pause = uni(rng) < 0.15;
    const auto length = static_cast<Eigen::Index>(
        (pause ? between(0.08, 0.35) : between(0.12, 0.30)) * fs);
    target = {between(300.0, 850.0), between(900.0, 2300.0), between(2300.0, 3300.0)};
    const double syllable_pitch = between(0.9, 1.1);
    const double loudness = between(0.6, 1.0);
    for (Eigen::Index k = 0; k < length && n < samples; ++k, ++n) {
      const double t = static_cast<double>(n) / fs;
      for (int i = 0; i < 3; ++i) current[i] += 0.002 * (target[i] - current[i]);
      double excitation = 0.0;
      if (!pause) {
        const double f0 = base_f0 * syllable_pitch *
                          (1.0 + 0.12 * std::sin(2.0 * std::numbers::pi * intonation_rate * t +
                                                 intonation_phase));
        phase += f0 / fs;
        if (phase >= 1.0) {
          phase -= 1.0;
          excitation = 1.0;
        }
        const double envelope =
            loudness * std::sin(std::numbers::pi * static_cast<double>(k) / length);
        excitation = envelope * (excitation + 0.03 * gauss(rng));
      }
      double y = excitation - prev_excitation;  // lip radiation
      prev_excitation = excitation;
      for (int i = 0; i < 3; ++i) y = formants[i].step(y, current[i], kBandwidth[i], fs) * 4.0;
      out[n] = y;
    }
  }
  normalize_rms(out);
  return out;
}

Signal music_like(std::uint64_t seed, Eigen::Index samples, double fs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  constexpr std::array<std::array<int, 4>, 4> kChords{{
      {0, 4, 7, 12}, {0, 3, 7, 12}, {0, 4, 7, 10}, {0, 3, 7, 10}}};

  Signal out = Signal::Zero(samples);
  const double tempo = between(0.4, 0.9);
  Eigen::Index start = 0;
  while (start < samples) {
    const auto length = static_cast<Eigen::Index>(tempo * fs * (uni(rng) < 0.3 ? 2.0 : 1.0));
    const int root = 45 + static_cast<int>(between(0.0, 15.0));
    const auto& chord = kChords[static_cast<std::size_t>(between(0.0, 3.999))];
    const double decay = between(1.5, 5.0);
    for (int v = 0; v < 5; ++v) {
      const int midi = v < 4 ? root + 12 + chord[v] : root - 12;
      const double freq = 440.0 * std::pow(2.0, (midi - 69) / 12.0);
      const double amp = v < 4 ? 1.0 : 0.8;
      const double phase0 = between(0.0, 2.0 * std::numbers::pi);
      for (Eigen::Index k = 0; k < length && start + k < samples; ++k) {
        const double t = static_cast<double>(k) / fs;
        const double env = std::min(1.0, t / 0.01) * std::exp(-decay * t);
        double tone = 0.0;
        for (int h = 1; h <= 5; ++h) {
          if (freq * h >= fs / 2) break;
          tone += std::sin(2.0 * std::numbers::pi * freq * h * t + phase0 * h) / h;
        }
        out[start + k] += amp * env * tone;
      }
    }
    start += length;
  }
  normalize_rms(out);
  return out;
}

Signal resolve_signal(const std::string& signal_id, Eigen::Index samples, double fs) {
  if (signal_id.rfind("speech:", 0) == 0) {
    return speech_like(parse_index(signal_id, 7) * 0x9E3779B97F4A7C15ull + kSpeechSalt,
                       samples, fs);
  }
  if (signal_id.rfind("music:", 0) == 0) {
    return music_like(parse_index(signal_id, 6) * 0x9E3779B97F4A7C15ull + kMusicSalt,
                      samples, fs);
  }
  if (signal_id.rfind("wav:", 0) == 0) {
    const io::Wav wav = io::read_wav(signal_id.substr(4));
    if (wav.sample_rate != static_cast<int>(fs)) {
      throw std::invalid_argument(signal_id + ": sample rate " +
                                  std::to_string(wav.sample_rate) + " Hz, need " +
                                  std::to_string(static_cast<int>(fs)));
    }
    if (wav.frames() < samples) {
      throw std::invalid_argument(signal_id + ": shorter than the scene duration");
    }
    return wav.samples.col(0).head(samples);
  }
  throw NotFoundError("unknown signal id: " + signal_id);
}

}  // namespace batkit::scene
