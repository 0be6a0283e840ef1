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

#include "batkit/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "batkit/brnet/checkpoint.hpp"
#include "batkit/brnet/render.hpp"
#include "batkit/error.hpp"
#include "batkit/io/wav.hpp"
#include "batkit/parallel.hpp"
#include "batkit/score/scrf.hpp"

namespace batkit::cli {
namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string scene_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04d", index);
  return buf;
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

std::vector<fs::path> sorted_wavs(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Maps bundled "speech:n" / "music:n" ids onto the sorted WAVs of a corpus
/// directory.
void remap_corpus(scene::SceneSpec& spec, const std::vector<fs::path>& speech, const std::vector<fs::path>& music) {
  const auto remap = [](scene::SourceSpec& s, const std::string& prefix, const std::vector<fs::path>& files) {
    if (s.signal_id.rfind(prefix, 0) != 0) return;
    const auto n = std::stoul(s.signal_id.substr(prefix.size()));
    s.signal_id = "wav:" + files[n % files.size()].string();
  };
  for (auto& s : spec.speakers) remap(s, "speech:", speech);
  for (auto& s : spec.interferers) remap(s, "music:", music);
}

scene::HrirSet load_hrirs(const std::string& source) {
  if (source == "synthetic") return scene::synthetic_hrir_set();
  return scene::load_hrir_set(source);
}

dsp::ErbFilterbank default_filterbank() {
  return dsp::build_erb_filterbank(brnet::ModelDims{}.bands, dsp::kFrameSize / 2 + 1, kSampleRate);
}

MultiSignal read_mics(const fs::path& path) {
  io::Wav wav = io::read_wav(path);
  if (wav.sample_rate != static_cast<int>(kSampleRate)) {
    throw std::invalid_argument(path.string() + ": sample rate " + std::to_string(wav.sample_rate) +
                                " Hz, expected 16000 Hz");
  }
  return std::move(wav.samples);
}

std::vector<ManifestEntry> select(const std::vector<ManifestEntry>& entries, const std::string& split) {
  if (split.empty()) return entries;
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == split) out.push_back(e);
  }
  if (out.empty()) throw std::invalid_argument("manifest has no scenes in split '" + split + "'");
  return out;
}

template <typename Scalar>
std::vector<brnet::TrainItem<Scalar>> load_items(const std::vector<const ManifestEntry*>& entries) {
  std::vector<brnet::TrainItem<Scalar>> items(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = *entries[i];
    const score::ScoreFeature feature = score::read_scrf(e.dir / kFeatureFile);
    const MultiSignal mics = read_mics(e.dir / kMicsFile);
    if (mics.cols() != e.geometry.mic_count()) {
      throw std::invalid_argument("scene " + e.id + ": mics.wav channel count does not match its geometry");
    }
    const Signal reference = mics.col(e.geometry.reference_index);
    items[i] = brnet::make_train_item<Scalar>(feature, reference, io::read_binaural(e.dir / kCleanFile),
                                              io::read_binaural(e.dir / kAmbienceFile));
  });
  return items;
}

template <typename Scalar>
std::vector<brnet::EpochLog> train_with(const std::vector<ManifestEntry>& entries, const RunConfig& config,
                                        const fs::path& out_dir) {
  std::vector<const ManifestEntry*> train, val;
  for (const auto& e : entries) {
    if (e.split == "train") train.push_back(&e);
    if (e.split == "val") val.push_back(&e);
  }
  if (train.empty()) throw std::invalid_argument("train: manifest has no 'train' scenes");
  if (val.empty()) throw std::invalid_argument("train: manifest has no 'val' scenes");
  brnet::TrainingData<Scalar> data;
  data.train = load_items<Scalar>(train);
  data.validation = load_items<Scalar>(val);
  return brnet::train(data, config.train, default_filterbank(), out_dir);
}

BinauralPair trimmed(const BinauralPair& p, Eigen::Index n) {
  return {p.left.head(n), p.right.head(n)};
}

}  // namespace

std::string rendered_name(const std::string& scene_id, double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_alpha%.2f.wav", alpha);
  return scene_id + buf;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("manifest not found: " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.split = j.at("split").get<std::string>();
      e.dir = base / j.at("dir").get<std::string>();
      e.geometry_id = j.at("geometry_id").get<std::string>();
      e.geometry = scene::geometry_from_json(j.at("geometry"));
      e.spec = scene::scene_from_json(j.at("spec"));
      entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": " + ex.what());
    }
  }
  if (entries.empty()) throw FormatError("manifest " + path.string() + " lists no scenes");
  return entries;
}

fs::path cmd_synth(const RunConfig& config) {
  config.validate();
  const fs::path out = config.paths.output;
  const scene::ArrayGeometry geometry = scene::load_geometry(config.paths.geometry);
  const std::string geometry_id = fs::path(config.paths.geometry).stem().string();
  const scene::HrirSet hrirs = load_hrirs(config.paths.hrir);

  std::vector<fs::path> speech, music;
  if (config.paths.corpus != "synthetic") {
    speech = sorted_wavs(fs::path(config.paths.corpus) / "speech");
    music = sorted_wavs(fs::path(config.paths.corpus) / "music");
    if (speech.empty() || music.empty()) {
      throw NotFoundError("corpus " + config.paths.corpus + " needs WAV files in speech/ and music/");
    }
  }
  make_dirs(out);

  scene::SceneRanges ranges;
  ranges.duration = config.dataset.duration;
  const int count = config.dataset.count;
  int validation = static_cast<int>(std::lround(count * config.dataset.validation_fraction));
  if (config.dataset.validation_fraction > 0.0 && count > 1) validation = std::clamp(validation, 1, count - 1);

  std::vector<json> lines(static_cast<std::size_t>(count));
  parallel_for(lines.size(), [&](std::size_t i) {
    const int index = static_cast<int>(i);
    const std::string id = scene_name(index);
    scene::SceneSpec spec = scene::sample_scene(splitmix64(config.dataset.seed ^ splitmix64(i)), ranges);
    if (!speech.empty()) remap_corpus(spec, speech, music);
    const scene::SceneMix mix = scene::mix_scene(spec, geometry, hrirs);
    const fs::path dir = out / "scenes" / id;
    make_dirs(dir);
    io::write_wav(dir / kMicsFile, mix.mics, static_cast<int>(kSampleRate));
    io::write_wav(dir / kCleanFile, mix.clean, static_cast<int>(kSampleRate));
    io::write_wav(dir / kAmbienceFile, mix.ambience, static_cast<int>(kSampleRate));
    io::write_wav(dir / kTargetFile, mix.target, static_cast<int>(kSampleRate));
    std::string split = config.dataset.split;
    if (split == "auto") split = index >= count - validation ? "val" : "train";
    lines[i] = {{"id", id},
                {"split", split},
                {"dir", fs::path("scenes") / id},
                {"geometry_id", geometry_id},
                {"geometry", scene::geometry_to_json(geometry)},
                {"spec", scene::scene_to_json(spec)}};
  });

  const fs::path manifest = out / "manifest.jsonl";
  std::ofstream m(manifest, std::ios::trunc);
  if (!m) throw IoError("cannot write " + manifest.string());
  for (const auto& l : lines) m << l.dump() << '\n';
  if (!m) throw IoError("failed writing " + manifest.string());
  return manifest;
}

void cmd_features(const fs::path& manifest, const std::optional<fs::path>& geometry_path,
                  const score::ScoreParams& params) {
  const auto entries = read_manifest(manifest);
  std::optional<scene::ArrayGeometry> override_geometry;
  if (geometry_path) override_geometry = scene::load_geometry(*geometry_path);
  const auto fb = default_filterbank();
  parallel_for(entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    const scene::ArrayGeometry& geometry = override_geometry ? *override_geometry : e.geometry;
    const MultiSignal mics = read_mics(e.dir / kMicsFile);
    if (mics.cols() != geometry.mic_count()) {
      throw std::invalid_argument("scene " + e.id + ": mics.wav has " + std::to_string(mics.cols()) +
                                  " channels but the geometry has " + std::to_string(geometry.mic_count()) + " mics");
    }
    score::write_scrf(e.dir / kFeatureFile, score::extract_score(mics, geometry, fb, params));
  });
}

std::vector<brnet::EpochLog> cmd_train(const fs::path& manifest, const RunConfig& config, const fs::path& out_dir) {
  config.validate();
  const auto entries = read_manifest(manifest);
  if (config.train.precision == brnet::Precision::kFloat64) return train_with<double>(entries, config, out_dir);
  return train_with<float>(entries, config, out_dir);
}

void cmd_render(const fs::path& checkpoint, const fs::path& mics, const fs::path& geometry, double alpha,
                const fs::path& out) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("--alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  const scene::ArrayGeometry g = scene::load_geometry(geometry);
  const BinauralPair y = brnet::render(checkpoint, read_mics(mics), g, alpha);
  if (out.has_parent_path()) make_dirs(out.parent_path());
  io::write_wav(out, y, static_cast<int>(kSampleRate));
}

void cmd_render_manifest(const fs::path& checkpoint, const fs::path& manifest, const std::vector<double>& alphas,
                         const fs::path& out_dir, const std::string& split) {
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("--alpha must lie in [0, 1], got " + std::to_string(a));
  }
  const auto entries = select(read_manifest(manifest), split);
  const brnet::ModelParams<float> params = brnet::load_checkpoint(checkpoint);
  make_dirs(out_dir);
  parallel_for(entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    const MultiSignal mics = read_mics(e.dir / kMicsFile);
    for (double a : alphas) {
      io::write_wav(out_dir / rendered_name(e.id, a), brnet::render(params, mics, e.geometry, a),
                    static_cast<int>(kSampleRate));
    }
  });
}

metrics::AggregateTable cmd_eval(const fs::path& manifest, const fs::path& rendered_dir,
                                 const std::vector<double>& alphas, const fs::path& out_dir,
                                 const std::string& split) {
  if (alphas.empty()) throw std::invalid_argument("eval: no alpha values given");
  const auto entries = select(read_manifest(manifest), split);
  const std::string example = rendered_name(entries.front().id, alphas.front());
  if (!fs::is_directory(rendered_dir) || fs::is_empty(rendered_dir)) {
    throw IoError("eval: rendered directory " + rendered_dir.string() +
                  " is missing or empty; expected files named <scene_id>_alpha<a.aa>.wav, e.g. " + example);
  }
  std::vector<metrics::MetricReport> reports(entries.size() * alphas.size());
  parallel_for(entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    const BinauralPair clean = io::read_binaural(e.dir / kCleanFile);
    const BinauralPair ambience = io::read_binaural(e.dir / kAmbienceFile);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      const fs::path file = rendered_dir / rendered_name(e.id, alphas[k]);
      if (!fs::exists(file)) throw NotFoundError("eval: missing rendered file " + file.string());
      const BinauralPair est = io::read_binaural(file);
      const BinauralPair ref = scene::blend_target(clean, ambience, alphas[k]);
      const Eigen::Index n = std::min(est.size(), ref.size());
      reports[i * alphas.size() + k] =
          metrics::evaluate(trimmed(ref, n), trimmed(est, n), e.id, e.geometry_id, alphas[k]);
    }
  });
  const metrics::AggregateTable table = metrics::aggregate(reports);
  make_dirs(out_dir);
  std::ofstream lines(out_dir / "reports.jsonl", std::ios::trunc);
  for (const auto& r : reports) lines << json(r).dump() << '\n';
  std::ofstream(out_dir / "table.txt", std::ios::trunc) << table.to_text();
  std::ofstream(out_dir / "table.json", std::ios::trunc) << json(table).dump(2) << '\n';
  if (!lines) throw IoError("failed writing reports into " + out_dir.string());
  return table;
}

nlohmann::json cmd_rir(const RirRequest& request, const fs::path& out) {
  if (!request.room.contains(request.source) || !request.room.contains(request.mic)) {
    throw std::invalid_argument("rir: source and mic must lie inside the room");
  }
  const scene::Rir rir = scene::simulate_rir(request.room, request.source, request.mic);
  const scene::RirSplit split = scene::split_clean_late(rir);
  if (out.has_parent_path()) make_dirs(out.parent_path());
  io::write_wav(out, MultiSignal(rir.taps), static_cast<int>(kSampleRate));
  return {{"taps", rir.taps.size()},
          {"direct_delay_samples", rir.direct_delay},
          {"t60_requested", request.room.t60},
          {"t60_measured", scene::schroeder_t60(rir.taps, rir.sample_rate)},
          {"clean_t60_measured", scene::schroeder_t60(split.clean.taps, rir.sample_rate)}};
}

}  // namespace batkit::cli
