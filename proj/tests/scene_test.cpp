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
#include <complex>
#include <numbers>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "batkit/dsp/convolve.hpp"
#include "batkit/error.hpp"
#include "batkit/io/wav.hpp"
#include "batkit/scene/corpus.hpp"
#include "batkit/scene/geometry.hpp"
#include "batkit/scene/hrir.hpp"
#include "batkit/scene/rir.hpp"
#include "batkit/scene/scene.hpp"
#include "temp_dir.hpp"

namespace batkit::scene {
namespace {

using batkit::testing::TempDir;

double power_db(const Signal& a, const Signal& b) {
  return 10.0 * std::log10(dsp::mean_power(a) / dsp::mean_power(b));
}

// ---- RIR ----------------------------------------------------------------

struct RirCase {
  double t60;
  Eigen::Vector3d source;
  Eigen::Vector3d mic;
};

class RirDecay : public ::testing::TestWithParam<RirCase> {};

TEST_P(RirDecay, SchroederT60WithinTwentyPercent) {
  const RirCase& c = GetParam();
  RoomSpec room;
  room.dimensions = {6.0, 4.0, 3.0};
  room.t60 = c.t60;
  const Rir rir = simulate_rir(room, c.source, c.mic);
  const double measured = schroeder_t60(rir.taps, rir.sample_rate);
  EXPECT_NEAR(measured, c.t60, 0.2 * c.t60);
}

INSTANTIATE_TEST_SUITE_P(
    Grid, RirDecay,
    ::testing::Values(RirCase{0.3, {1.5, 1.5, 1.5}, {4.0, 2.5, 1.5}},
                      RirCase{0.4, {1.5, 1.5, 1.5}, {4.0, 2.5, 1.5}},
                      RirCase{0.5, {1.5, 1.5, 1.5}, {4.0, 2.5, 1.5}},
                      RirCase{0.6, {1.5, 1.5, 1.5}, {4.0, 2.5, 1.5}},
                      RirCase{0.3, {0.8, 3.1, 1.2}, {3.3, 1.9, 1.6}},
                      RirCase{0.6, {0.8, 3.1, 1.2}, {3.3, 1.9, 1.6}}),
    [](const ::testing::TestParamInfo<RirCase>& info) {
      return "case" + std::to_string(info.index) + "_t60_" +
             std::to_string(static_cast<int>(std::lround(info.param.t60 * 1000))) + "ms";
    });

TEST(Rir, FlatRoomDecayStillWithinTolerance) {
  RoomSpec room;
  room.dimensions = {9.0, 7.0, 2.6};
  room.t60 = 0.6;
  const Rir rir = simulate_rir(room, {2.0, 2.0, 1.3}, {6.5, 4.5, 1.5});
  EXPECT_NEAR(schroeder_t60(rir.taps, rir.sample_rate), 0.6, 0.12);
}

TEST(Rir, AnechoicIsOneSincImpulse) {
  RoomSpec room;
  room.t60 = 0.0;
  const Eigen::Vector3d src{1.0, 1.0, 1.5}, mic{3.0, 2.2, 1.4};
  const Rir rir = simulate_rir(room, src, mic);
  const double d = (src - mic).norm();
  EXPECT_NEAR(rir.direct_delay, d / kSoundSpeed * kSampleRate, 1e-12);
  // Independent evaluation of the 16-tap Hann-windowed sinc.
  for (Eigen::Index n = 0; n < rir.taps.size(); ++n) {
    const double t = static_cast<double>(n) - rir.direct_delay;
    double expected = 0.0;
    if (std::abs(t) < 8.0) {
      const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
      expected = sinc * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t / 16.0)) /
                 (4.0 * std::numbers::pi * d);
    }
    EXPECT_NEAR(rir.taps[n], expected, 1e-12) << "tap " << n;
  }
}

TEST(Rir, DoublingDistanceHalvesDirectAmplitude) {
  RoomSpec room;
  room.dimensions = {20.0, 20.0, 10.0};
  room.t60 = 0.0;
  // Integer-sample delays so the peak tap carries the full amplitude.
  const double metres_per_sample = kSoundSpeed / kSampleRate;
  const Eigen::Vector3d src{2.0, 5.0, 5.0};
  const Rir a = simulate_rir(room, src, src + Eigen::Vector3d(100 * metres_per_sample, 0, 0));
  const Rir b = simulate_rir(room, src, src + Eigen::Vector3d(200 * metres_per_sample, 0, 0));
  EXPECT_NEAR(b.taps.maxCoeff() / a.taps.maxCoeff(), 0.5, 1e-9);
}

TEST(Rir, NothingPrecedesTheDirectPath) {
  RoomSpec room;
  room.t60 = 0.4;
  const Eigen::Vector3d src{1.5, 1.0, 1.2}, mic{4.0, 3.0, 1.6};
  const Rir rir = simulate_rir(room, src, mic);
  // The 16-tap kernel starts 7 samples before floor(delay).
  const auto first = static_cast<Eigen::Index>(std::floor(rir.direct_delay)) - 7;
  EXPECT_EQ(rir.taps.head(first).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(rir.taps.segment(first, 16).cwiseAbs().maxCoeff(), 0.5 / (4.0 * std::numbers::pi * (src - mic).norm()));
}

TEST(Rir, RejectsPositionsOutsideRoom) {
  RoomSpec room;
  EXPECT_THROW(simulate_rir(room, {-0.1, 1.0, 1.0}, {2.0, 2.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(simulate_rir(room, {1.0, 1.0, 1.0}, {2.0, 2.0, 3.5}), std::invalid_argument);
  room.t60 = -0.1;
  EXPECT_THROW(simulate_rir(room, {1.0, 1.0, 1.0}, {2.0, 2.0, 1.0}), std::invalid_argument);
}

TEST(RirSplit, ExactResidualAndShortCleanDecay) {
  RoomSpec room;
  room.t60 = 0.6;
  const Rir rir = simulate_rir(room, {1.2, 1.1, 1.4}, {4.1, 2.6, 1.5});
  const RirSplit split = split_clean_late(rir, kEarlyMs, kCleanT60);
  EXPECT_LE((split.clean.taps + split.late.taps - rir.taps).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(schroeder_t60(split.clean.taps, rir.sample_rate), 0.24);
  // The early window is untouched.
  const auto early = static_cast<Eigen::Index>(rir.direct_delay + kEarlyMs * 1e-3 * kSampleRate);
  EXPECT_EQ(split.late.taps.head(early).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RirSplit, AnechoicHasNoLatePart) {
  RoomSpec room;
  room.t60 = 0.0;
  const Rir rir = simulate_rir(room, {1.0, 1.0, 1.0}, {2.0, 1.5, 1.0});
  const RirSplit split = split_clean_late(rir);
  EXPECT_EQ(split.late.taps.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(split.clean.taps, rir.taps);
}

TEST(RirSplit, Rejects) {
  Rir empty;
  EXPECT_THROW(split_clean_late(empty), std::invalid_argument);
  Rir one;
  one.taps = Eigen::VectorXd::Ones(4);
  EXPECT_THROW(split_clean_late(one, -1.0), std::invalid_argument);
  EXPECT_THROW(split_clean_late(one, 20.0, 0.0), std::invalid_argument);
}

TEST(Schroeder, PureExponentialDecay) {
  // Energy decays 60 dB in 0.45 s.
  const double fs = 16000.0, t60 = 0.45;
  Eigen::VectorXd h(static_cast<Eigen::Index>(fs));
  for (Eigen::Index n = 0; n < h.size(); ++n) h[n] = std::pow(10.0, -3.0 * (n / fs) / t60);
  EXPECT_NEAR(schroeder_t60(h, fs), t60, 0.01 * t60);
}

// ---- HRIR ---------------------------------------------------------------

TEST(Hrir, FrontIsSymmetric) {
  const HrirPair h = synth_hrir(0.0);
  EXPECT_LE((h.left - h.right).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Hrir, MirrorAzimuthSwapsEars) {
  for (double az : {15.0, 60.0, 90.0, 135.0, 170.0}) {
    const HrirPair a = synth_hrir(az);
    const HrirPair b = synth_hrir(360.0 - az);
    EXPECT_EQ(a.left, b.right) << az;
    EXPECT_EQ(a.right, b.left) << az;
  }
}

TEST(Hrir, WoodworthItdAtNinetyDegrees) {
  const double expected = 0.0875 / 343.0 * (std::numbers::pi / 2 + 1.0);
  EXPECT_NEAR(woodworth_itd(90.0), expected, 1e-15);
  EXPECT_NEAR(woodworth_itd(90.0) * 1e3, 0.66, 0.005);
  EXPECT_NEAR(woodworth_itd(0.0), 0.0, 1e-15);
}

TEST(Hrir, RealizedDelayMatchesWoodworth) {
  SphericalHead head;
  head.shadow_pole = 0.0;  // pure delay, so phase gives the ITD
  for (double az : {30.0, 90.0}) {
    const HrirPair h = synth_hrir(az, head);
    const double hz = 300.0;
    std::complex<double> cross = 0.0;
    for (Eigen::Index n = 0; n < h.left.size(); ++n) {
      for (Eigen::Index m = 0; m < h.right.size(); ++m) {
        if (h.left[n] == 0.0 || h.right[m] == 0.0) continue;
        cross += h.right[m] * h.left[n] *
                 std::polar(1.0, 2.0 * std::numbers::pi * hz * static_cast<double>(n - m) / kSampleRate);
      }
    }
    const double itd = -std::arg(cross) / (2.0 * std::numbers::pi * hz);
    EXPECT_NEAR(itd, woodworth_itd(az, head), 0.02 * woodworth_itd(az, head)) << az;
  }
}

TEST(Hrir, ShadowedEarIsQuieter) {
  const HrirPair h = synth_hrir(90.0);  // source on the left
  EXPECT_GT(h.left.squaredNorm(), h.right.squaredNorm());
}

TEST(HrirSet, NearestUsesCircularDistance) {
  const HrirSet set = synthetic_hrir_set(30.0);
  EXPECT_EQ(set.entries.size(), 12u);
  EXPECT_EQ(&set.nearest(355.0), &set.entries.at(0.0));
  EXPECT_EQ(&set.nearest(-40.0), &set.entries.at(330.0));
  EXPECT_EQ(&set.nearest(44.0), &set.entries.at(30.0));
}

TEST(HrirSet, SaveLoadRoundTrip) {
  TempDir dir;
  const HrirSet set = synthetic_hrir_set(15.0);
  save_hrir_set(dir.path(), set);
  const HrirSet back = load_hrir_set(dir / "index.json");
  ASSERT_EQ(back.entries.size(), 24u);
  for (const auto& [az, pair] : set.entries) {
    const HrirPair& b = back.entries.at(az);
    EXPECT_LE((b.left - pair.left).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LE((b.right - pair.right).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(HrirSet, LoadErrorsNameTheEntry) {
  TempDir dir;
  save_hrir_set(dir.path(), synthetic_hrir_set(15.0));
  EXPECT_THROW(load_hrir_set(dir / "nope.json"), NotFoundError);

  std::filesystem::remove(dir / "az030.00_R.wav");
  try {
    load_hrir_set(dir / "index.json");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("az030.00_R.wav"), std::string::npos) << e.what();
  }

  TempDir hi;
  HrirSet fast = synthetic_hrir_set(15.0);
  fast.sample_rate = 48000.0;
  save_hrir_set(hi.path(), fast);
  try {
    load_hrir_set(hi / "index.json");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("sample-rate mismatch"), std::string::npos) << e.what();
  }

  TempDir few;
  HrirSet sparse;
  for (double az = 0.0; az < 360.0; az += 36.0) sparse.entries[az] = synth_hrir(az);
  save_hrir_set(few.path(), sparse);
  EXPECT_THROW(load_hrir_set(few / "index.json"), FormatError);
}

// ---- Corpus -------------------------------------------------------------

TEST(Corpus, BundledSignalsAreDeterministicWithUnitLevel) {
  for (const char* id : {"speech:3", "music:1"}) {
    const Signal a = resolve_signal(id, 16000);
    const Signal b = resolve_signal(id, 16000);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(std::sqrt(dsp::mean_power(a)), 0.1, 1e-9) << id;
  }
  EXPECT_NE(resolve_signal("speech:3", 1000), resolve_signal("speech:4", 1000));
}

TEST(Corpus, WavSourcesAndErrors) {
  TempDir dir;
  MultiSignal x = MultiSignal::Random(400, 2) * 0.5;
  io::write_wav(dir / "s.wav", x, 16000);
  const Signal s = resolve_signal("wav:" + (dir / "s.wav").string(), 300);
  EXPECT_LE((s - x.col(0).head(300)).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_THROW(resolve_signal("wav:" + (dir / "s.wav").string(), 500), std::invalid_argument);
  EXPECT_THROW(resolve_signal("wav:" + (dir / "none.wav").string(), 10), NotFoundError);
  EXPECT_THROW(resolve_signal("noise:1", 10), NotFoundError);
}

// ---- Scene sampling and mixing -------------------------------------------

TEST(SampleScene, ThousandScenesRespectTheRecipe) {
  const std::set<double> sirs{5.0, 10.0, 15.0}, snrs{20.0, 25.0, 30.0}, t60s{0.3, 0.4, 0.5, 0.6};
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const SceneSpec s = sample_scene(seed);
    ASSERT_EQ(s.speakers.size(), 2u);
    ASSERT_EQ(s.interferers.size(), 1u);
    EXPECT_TRUE(sirs.count(s.sir)) << seed;
    EXPECT_TRUE(snrs.count(s.snr)) << seed;
    EXPECT_TRUE(t60s.count(s.room.t60)) << seed;
    std::vector<SourceSpec> all = s.speakers;
    all.insert(all.end(), s.interferers.begin(), s.interferers.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      EXPECT_TRUE(s.room.contains(source_world_position(s.room, all[i])));
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        EXPECT_GE(azimuth_gap(all[i].azimuth, all[j].azimuth), 30.0) << seed;
      }
    }
  }
}

TEST(SampleScene, DeterministicAndRejectsImpossibleSector) {
  EXPECT_EQ(scene_to_json(sample_scene(42)), scene_to_json(sample_scene(42)));
  EXPECT_NE(scene_to_json(sample_scene(42)), scene_to_json(sample_scene(43)));
  SceneRanges narrow;
  narrow.azimuth_min = 0.0;
  narrow.azimuth_max = 20.0;
  EXPECT_THROW(sample_scene(1, narrow), std::invalid_argument);
}

TEST(SceneSpec, JsonRoundTrip) {
  const SceneSpec s = sample_scene(9);
  EXPECT_EQ(scene_to_json(scene_from_json(scene_to_json(s))), scene_to_json(s));
}

class MixTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SceneRanges ranges;
    ranges.duration = 1.0;
    spec_ = new SceneSpec(sample_scene(11, ranges));
    hrirs_ = new HrirSet(synthetic_hrir_set());
    mix_ = new SceneMix(mix_scene(*spec_, circular_array(5, 0.05), *hrirs_));
  }
  static void TearDownTestSuite() {
    delete mix_;
    delete hrirs_;
    delete spec_;
  }
  static SceneSpec* spec_;
  static HrirSet* hrirs_;
  static SceneMix* mix_;
};

SceneSpec* MixTest::spec_ = nullptr;
HrirSet* MixTest::hrirs_ = nullptr;
SceneMix* MixTest::mix_ = nullptr;

TEST_F(MixTest, Shapes) {
  EXPECT_EQ(mix_->mics.rows(), 16000);
  EXPECT_EQ(mix_->mics.cols(), 5);
  EXPECT_EQ(mix_->target.size(), 16000);
}

TEST_F(MixTest, SirAndSnrAtReferenceMic) {
  EXPECT_NEAR(power_db(mix_->speech_ref, mix_->interferer_ref), spec_->sir, 0.1);
  const Signal noiseless = mix_->speech_ref + mix_->interferer_ref;
  EXPECT_NEAR(power_db(noiseless, mix_->noise_ref), spec_->snr, 0.1);
  const Signal recomposed = noiseless + mix_->noise_ref;
  EXPECT_LE((recomposed - mix_->mics.col(0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_F(MixTest, TargetIsAlphaBlend) {
  const BinauralPair e = blend_target(mix_->clean, mix_->ambience, 0.0);
  EXPECT_EQ(e.left, mix_->clean.left);
  EXPECT_EQ(e.right, mix_->clean.right);
  const BinauralPair i = blend_target(mix_->clean, mix_->ambience, 1.0);
  EXPECT_LE((i.left - (mix_->clean.left + mix_->ambience.left)).cwiseAbs().maxCoeff(), 0.0);
  const BinauralPair t = blend_target(mix_->clean, mix_->ambience, spec_->alpha);
  EXPECT_LE((t.left - mix_->target.left).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((t.right - mix_->target.right).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT(dsp::mean_power(mix_->ambience.left), 0.0);
}

TEST_F(MixTest, BitIdenticalOnRerun) {
  const SceneMix again = mix_scene(*spec_, circular_array(5, 0.05), *hrirs_);
  EXPECT_EQ(again.mics, mix_->mics);
  EXPECT_EQ(again.target.left, mix_->target.left);
  EXPECT_EQ(again.target.right, mix_->target.right);
}

TEST(Mix, Errors) {
  SceneRanges ranges;
  ranges.duration = 0.25;
  SceneSpec spec = sample_scene(3, ranges);
  const HrirSet hrirs = synthetic_hrir_set(30.0);
  SceneSpec bad = spec;
  bad.speakers[0].signal_id = "nothing:1";
  EXPECT_THROW(mix_scene(bad, circular_array(3, 0.05), hrirs), NotFoundError);
  bad = spec;
  bad.alpha = 1.5;
  EXPECT_THROW(mix_scene(bad, circular_array(3, 0.05), hrirs), std::invalid_argument);
  HrirSet fast = hrirs;
  fast.sample_rate = 48000.0;
  EXPECT_THROW(mix_scene(spec, circular_array(3, 0.05), fast), std::invalid_argument);
}

}  // namespace
}  // namespace batkit::scene
