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

// Acceptance runner: checks criteria 1-11 at their stated tolerances and
// prints one PASS/FAIL line per criterion. Exit status is 0 only when every
// selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "batkit/brnet/checkpoint.hpp"
#include "batkit/brnet/render.hpp"
#include "batkit/cli/commands.hpp"
#include "batkit/cli/config.hpp"
#include "batkit/dsp/convolve.hpp"
#include "batkit/io/wav.hpp"
#include "batkit/metrics/metrics.hpp"
#include "batkit/scene/hrir.hpp"
#include "batkit/scene/rir.hpp"
#include "batkit/score/score.hpp"
#include "grad_check.hpp"
#include "oracles.hpp"
#include "tiny_model.hpp"

namespace {

namespace fs = std::filesystem;
using namespace batkit;
using Clock = std::chrono::steady_clock;

const fs::path kSource = BATKIT_SOURCE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const dsp::ErbFilterbank& filterbank() {
  static const dsp::ErbFilterbank fb = dsp::build_erb_filterbank(32, testing::kFullBins, kSampleRate);
  return fb;
}

cli::RunConfig base_config(const fs::path& out, const std::string& geometry = "g1") {
  cli::RunConfig c = cli::config_from_json(cli::default_config_json());
  c.paths.geometry = (kSource / "configs" / (geometry + ".json")).string();
  c.paths.output = out.string();
  return c;
}

// ---- 1 --------------------------------------------------------------------

Outcome plane_wave_oracle() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (int mics : {3, 5, 7}) {
    const scene::ArrayGeometry g = scene::circular_array(mics, 0.05);
    for (int q = 0; q < 12; ++q) {
      const auto specs = testing::plane_wave(g, 30.0 * q, 311, 100 * mics + q);
      const score::ScoreFeature feat = score::extract_score(specs, g, filterbank());
      for (Eigen::Index l = 0; l < feat.frames(); ++l) {
        for (int b = 0; b < feat.bands; ++b) worst = std::max(worst, std::abs(feat.at(l, b, q) - 1.0));
      }
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-6 && t < 30.0,
          fmt("M in {3,5,7}, all 12 directions, 311 frames: max |zeta - 1| = %.2e (<= 1e-6), %.1f s (< 30 s)", worst, t)};
}

// ---- 2 --------------------------------------------------------------------

Outcome brute_force_score() {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> pos(-0.06, 0.06);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    scene::ArrayGeometry g;
    for (int m = 0; m < 4; ++m) g.mic_positions.push_back({pos(rng), pos(rng), pos(rng) / 4});
    g.reference_index = trial;
    std::vector<dsp::Spectrogram> specs;
    for (int m = 0; m < 4; ++m) specs.push_back(testing::random_spec(12, rng));
    const score::ScoreFeature feat = score::extract_score(specs, g, filterbank());
    const auto expected = testing::direct_score(specs, g, filterbank());
    for (Eigen::Index l = 0; l < feat.frames(); ++l) {
      for (int b = 0; b < 32; ++b) {
        for (int q = 0; q < 12; ++q) worst = std::max(worst, std::abs(expected[l](b, q) - feat.at(l, b, q)));
      }
    }
  }
  return {worst <= 1e-10, fmt("3 random 4-mic arrays x 12 frames: max abs error %.2e (<= 1e-10)", worst)};
}

// ---- 3 --------------------------------------------------------------------

Outcome stft_and_erb() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  double round_trip = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x(80000);
    for (auto& v : x) v = g(rng);
    const Eigen::VectorXd y = dsp::istft(dsp::stft(x));
    const Eigen::Index start = dsp::kHop, len = y.size() - dsp::kFrameSize;
    round_trip =
        std::max(round_trip, (y.segment(start, len) - x.segment(start, len)).norm() / x.segment(start, len).norm());
  }
  const auto& fb = filterbank();
  bool eq7 = true;
  for (int b = 0; b < fb.bands(); ++b) {
    double sum = 0.0;
    for (int f = 0; f < fb.bins(); ++f) sum += fb.weights(b, f);
    eq7 = eq7 && sum == fb.normalizers[b];
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(1000, fb.bins());
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  x.row(0).setOnes();
  x.row(1).setConstant(-1.0);
  const Eigen::MatrixXd c = dsp::erb_compress(x, fb);
  const double excess = std::max(c.maxCoeff() - 1.0, -1.0 - c.minCoeff());
  return {round_trip <= 1e-6 && eq7 && excess <= 0.0,
          fmt("STFT round trip rel. error %.2e (<= 1e-6); band sums exact: %s; 1000 inputs in [-1,1] -> [%.17g, %.17g]",
              round_trip, eq7 ? "yes" : "no", c.minCoeff(), c.maxCoeff())};
}

// ---- 4 --------------------------------------------------------------------

Outcome rir_physics() {
  struct Pair {
    Eigen::Vector3d source, mic;
  };
  const std::vector<Pair> pairs{{{1.5, 1.5, 1.5}, {4.0, 2.5, 1.5}}, {{0.8, 3.1, 1.2}, {3.3, 1.9, 1.6}}};
  double worst_rel = 0.0, worst_split = 0.0, worst_clean = 0.0;
  std::ostringstream measured;
  for (double t60 : {0.3, 0.4, 0.5, 0.6}) {
    for (const auto& p : pairs) {
      scene::RoomSpec room;
      room.dimensions = {6.0, 4.0, 3.0};
      room.t60 = t60;
      const scene::Rir rir = scene::simulate_rir(room, p.source, p.mic);
      const double m = scene::schroeder_t60(rir.taps, rir.sample_rate);
      worst_rel = std::max(worst_rel, std::abs(m - t60) / t60);
      measured << fmt("%.3f ", m);
      const scene::RirSplit split = scene::split_clean_late(rir);
      worst_split = std::max(worst_split, (split.clean.taps + split.late.taps - rir.taps).cwiseAbs().maxCoeff());
      worst_clean = std::max(worst_clean, scene::schroeder_t60(split.clean.taps, rir.sample_rate));
    }
  }
  return {worst_rel <= 0.2 && worst_split <= 1e-12 && worst_clean <= 0.24,
          fmt("T60 0.3-0.6 s at 2 position pairs, measured [%s]: worst error %.1f%% (<= 20%%); split residual %.1e "
              "(<= 1e-12); clean T60 max %.3f s (<= 0.24)",
              measured.str().c_str(), 100.0 * worst_rel, worst_split, worst_clean)};
}

// ---- 5 --------------------------------------------------------------------

Outcome gradient_check() {
  const auto start = Clock::now();
  const auto fb = testing::tiny_filterbank();
  double worst = 0.0;
  int fewest = 1 << 30;
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto checks = testing::check_gradients(testing::tiny_params(10 + seed), testing::tiny_item(seed), 0.7, 0.3,
                                                 fb, 20, seed);
    for (const auto& c : checks) {
      worst = std::max(worst, c.relative_error);
      fewest = std::min(fewest, c.coordinates);
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-4 && fewest >= 20 && t < 120.0,
          fmt("3 seeds x 20 tensors, >= %d coordinates each: worst rel. error %.2e (<= 1e-4), %.1f s (< 120 s)", fewest,
              worst, t)};
}

// ---- 6 --------------------------------------------------------------------

Outcome deep_filter_oracle() {
  const brnet::ModelDims dims;
  const Eigen::Index frames = 20;
  const auto out = testing::random_output(dims, 6, frames);
  std::mt19937_64 rng(7);
  const auto ref = testing::random_spectrum(rng, frames, testing::kFullBins);
  const auto y = brnet::apply_output(out, ref, filterbank());
  const auto expected = testing::deep_filter_oracle(out, ref, filterbank());
  double worst = 0.0;
  for (int ear = 0; ear < 2; ++ear) worst = std::max(worst, (expected[ear] - y[ear]).cwiseAbs().maxCoeff());

  auto identity = out;
  identity.erb_gains.setOnes();
  identity.df_coeffs.setZero();
  for (int ear = 0; ear < 2; ++ear) {
    for (int f = 0; f < dims.df_bins; ++f) identity.df_coeffs.row(identity.coeff_row(ear, 0, f)).setOnes();
  }
  const auto same = brnet::apply_output(identity, ref, filterbank());
  const bool exact = same[0] == ref && same[1] == ref;
  return {worst <= 1e-10 && exact,
          fmt("full size (257 bins, 160 DF bins, 5 taps): max abs error %.2e (<= 1e-10); identity filter exact: %s",
              worst, exact ? "yes" : "no")};
}

// ---- 7, 8, 10: the toy run ------------------------------------------------

struct ToyRun {
  fs::path manifest;
  fs::path checkpoint;
  std::vector<brnet::EpochLog> logs;
  double seconds = 0.0;
  std::string error;
};

const ToyRun& toy_run(const fs::path& work) {
  static std::optional<ToyRun> run;
  if (run) return *run;
  run.emplace();
  const auto start = Clock::now();
  try {
    const cli::RunConfig config = base_config(work / "toy");
    run->manifest = cli::cmd_synth(config);
    cli::cmd_features(run->manifest, std::nullopt, config.score);
    run->logs = cli::cmd_train(run->manifest, config, work / "toy" / "model");
    run->checkpoint = work / "toy" / "model" / "best.brn";
  } catch (const std::exception& e) {
    run->error = e.what();
  }
  run->seconds = seconds_since(start);
  return *run;
}

Outcome toy_training(const fs::path& work) {
  const ToyRun& run = toy_run(work);
  if (!run.error.empty()) return {false, "toy run failed: " + run.error};
  const auto& logs = run.logs;
  const std::set<double> allowed{0.0, 0.3, 0.5, 0.7, 1.0};
  double max_clipped = 0.0;
  bool alphas_ok = true;
  std::size_t steps = 0;
  for (const auto& e : logs) {
    max_clipped = std::max(max_clipped, e.max_clipped_norm);
    for (double a : e.alphas) alphas_ok = alphas_ok && allowed.count(a) == 1;
    steps += e.alphas.size();
  }
  const double ratio = logs.back().train_loss / logs.front().train_loss;
  std::ostringstream curve;
  for (const auto& e : logs) curve << fmt("%.0f ", e.train_loss);
  return {logs.size() == 20 && ratio <= 0.5 && max_clipped <= 3.0 + 1e-9 && alphas_ok && run.seconds < 600.0,
          fmt("50 scenes, 20 epochs: final/epoch-1 train loss %.3f (<= 0.5) [%s]; max clipped norm %.3f (<= 3); "
              "%zu alphas all in {0,.3,.5,.7,1}: %s; %.0f s incl. synthesis (< 600 s)",
              ratio, curve.str().c_str(), max_clipped, steps, alphas_ok ? "yes" : "no", run.seconds)};
}

double energy(const BinauralPair& p) { return p.left.squaredNorm() + p.right.squaredNorm(); }

Outcome alpha_trend(const fs::path& work) {
  const ToyRun& run = toy_run(work);
  if (!run.error.empty()) return {false, "toy run failed: " + run.error};
  cli::RunConfig config = base_config(work / "heldout");
  config.dataset.count = 10;
  config.dataset.seed = 1007;
  config.dataset.split = "test";
  const auto entries = cli::read_manifest(cli::cmd_synth(config));
  const auto params = brnet::load_checkpoint(run.checkpoint);
  std::vector<double> ratios;
  double min_diff = 1e300;
  for (const auto& e : entries) {
    const MultiSignal mics = io::read_wav(e.dir / cli::kMicsFile).samples;
    const BinauralPair y0 = brnet::render(params, mics, e.geometry, 0.0);
    const BinauralPair y1 = brnet::render(params, mics, e.geometry, 1.0);
    const double diff = ((y1.left - y0.left).cwiseAbs().sum() + (y1.right - y0.right).cwiseAbs().sum()) /
                        static_cast<double>(2 * y0.size());
    min_diff = std::min(min_diff, diff);
    ratios.push_back(energy(y1) / energy(y0));
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = 0.5 * (ratios[ratios.size() / 2 - 1] + ratios[ratios.size() / 2]);
  return {entries.size() >= 10 && min_diff > 0.0 && median > 1.0,
          fmt("%zu held-out scenes: smallest mean |y(1) - y(0)| %.2e (> 0); median energy ratio alpha 1/0 %.3f (> 1), "
              "range [%.3f, %.3f]",
              entries.size(), min_diff, median, ratios.front(), ratios.back())};
}

// ---- 9 --------------------------------------------------------------------

Outcome metrics_identities() {
  std::mt19937 rng(9);
  std::normal_distribution<double> g(0.0, 0.1);
  Signal s(32000);
  for (auto& v : s) v = g(rng);
  const scene::HrirPair h = scene::synth_hrir(60.0);
  const BinauralPair ref{dsp::convolve(h.left, s, s.size()), dsp::convolve(h.right, s, s.size())};
  const double ipd = metrics::mw_ipde(ref, ref), ild = metrics::mw_ilde(ref, ref), sdr = metrics::msi_sdr(ref, ref);

  const Eigen::Index n = ref.size();
  Eigen::VectorXd y(2 * n), e(2 * n);
  y << ref.left, ref.right;
  for (auto& v : e) v = g(rng);
  e -= (e.dot(y) / y.squaredNorm()) * y;
  e *= std::sqrt(y.squaredNorm() / (10.0 * e.squaredNorm()));
  const BinauralPair est{ref.left + e.head(n), ref.right + e.tail(n)};
  const double ten = metrics::msi_sdr(ref, est);

  bool scale_exact = true;
  for (double c : {0.25, 2.0, 8.0}) {
    scale_exact = scale_exact && metrics::msi_sdr(ref, {est.left * c, est.right * c}) == ten;
  }
  const double scaled_ref = metrics::msi_sdr(ref, {ref.left * 0.3, ref.right * 0.3});
  return {ipd == 0.0 && ild == 0.0 && sdr == 60.0 && std::abs(ten - 10.0) <= 0.1 && scale_exact && scaled_ref == 60.0,
          fmt("identity: mw-IPDe %g, mw-ILDe %g, mSI-SDR %g; 10 dB orthogonal noise -> %.6f dB; power-of-two scaling "
              "bit-identical: %s; 0.3 x ref -> %g dB",
              ipd, ild, sdr, ten, scale_exact ? "yes" : "no", scaled_ref)};
}

// ---- 10 -------------------------------------------------------------------

Outcome array_agnostic(const fs::path& work) {
  const ToyRun& run = toy_run(work);
  if (!run.error.empty()) return {false, "toy run failed: " + run.error};
  const auto params = brnet::load_checkpoint(run.checkpoint);
  std::ostringstream detail;
  bool ok = true;
  for (const char* geometry : {"g1", "g2", "g3"}) {
    cli::RunConfig config = base_config(work / geometry, geometry);
    config.dataset.count = 2;
    config.dataset.duration = 2.0;
    config.dataset.seed = 10;
    config.dataset.split = "test";
    try {
      const auto entries = cli::read_manifest(cli::cmd_synth(config));
      for (const auto& e : entries) {
        const MultiSignal mics = io::read_wav(e.dir / cli::kMicsFile).samples;
        const BinauralPair y = brnet::render(params, mics, e.geometry, 0.5);
        ok = ok && y.size() == mics.rows() && y.left.allFinite() && y.right.allFinite() && energy(y) > 0.0;
      }
      detail << geometry << " (" << entries.front().geometry.mic_count() << " mics) ok; ";
    } catch (const std::exception& ex) {
      ok = false;
      detail << geometry << " failed: " << ex.what() << "; ";
    }
  }
  return {ok, "one checkpoint, no retraining: " + detail.str()};
}

// ---- 11 -------------------------------------------------------------------

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

void pipeline(const fs::path& out) {
  cli::RunConfig config = base_config(out);
  config.dataset.count = 4;
  config.dataset.duration = 2.0;
  config.dataset.seed = 21;
  config.train.epochs = 2;
  const fs::path manifest = cli::cmd_synth(config);
  cli::cmd_features(manifest, std::nullopt, config.score);
  cli::cmd_train(manifest, config, out / "model");
  const std::vector<double> alphas{0.0, 0.5, 1.0};
  cli::cmd_render_manifest(out / "model" / "best.brn", manifest, alphas, out / "rendered");
  cli::cmd_eval(manifest, out / "rendered", alphas, out / "eval");
}

Outcome determinism(const fs::path& work) {
  try {
    pipeline(work / "run_a");
    pipeline(work / "run_b");
  } catch (const std::exception& e) {
    return {false, std::string("pipeline failed: ") + e.what()};
  }
  const auto a = tree_bytes(work / "run_a");
  const auto b = tree_bytes(work / "run_b");
  std::size_t bytes = 0, differing = 0;
  for (const auto& [name, content] : a) {
    bytes += content.size();
    const auto it = b.find(name);
    if (it == b.end() || it->second != content) ++differing;
  }
  const bool same_names = a.size() == b.size();
  return {same_names && differing == 0 && !a.empty(),
          fmt("synth -> features -> train -> render -> eval twice: %zu files, %.1f MB, %zu differ", a.size(),
              bytes / 1e6, differing + (same_names ? 0 : 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-11"};
  std::string work_arg;
  std::vector<int> only;
  bool keep = false;
  app.add_option("--work", work_arg, "scratch directory (default: a fresh temporary directory)");
  app.add_option("--only", only, "run only these criteria")->delimiter(',')->check(CLI::Range(1, 11));
  app.add_flag("--keep", keep, "keep the scratch directory");
  CLI11_PARSE(app, argc, argv);

  fs::path work = work_arg;
  if (work.empty()) {
    std::random_device rd;
    work = fs::temp_directory_path() / fmt("batkit_acceptance_%08x", rd());
  }
  fs::create_directories(work);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, plane_wave_oracle},
      {2, brute_force_score},
      {3, stft_and_erb},
      {4, rir_physics},
      {5, gradient_check},
      {6, deep_filter_oracle},
      {7, [&] { return toy_training(work); }},
      {8, [&] { return alpha_trend(work); }},
      {9, metrics_identities},
      {10, [&] { return array_agnostic(work); }},
      {11, [&] { return determinism(work); }},
  };
  int failed = 0;
  for (const auto& [number, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << fmt("criterion %2d %s  (%.1f s)  ", number, o.pass ? "PASS" : "FAIL", seconds_since(start)) << o.detail
              << std::endl;
  }
  if (!keep && work_arg.empty()) fs::remove_all(work);
  std::cout << (failed == 0 ? "all criteria passed" : fmt("%d criteria failed", failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
