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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "batkit/cli/config.hpp"
#include "batkit/metrics/metrics.hpp"
#include "batkit/scene/geometry.hpp"
#include "batkit/scene/scene.hpp"

namespace batkit::cli {

namespace fs = std::filesystem;

/// One line of manifest.jsonl. `dir` is stored relative to the manifest and
/// resolved to an absolute path on read.
struct ManifestEntry {
  std::string id;
  std::string split;  // "train", "val" or a configured name
  fs::path dir;
  std::string geometry_id;
  scene::ArrayGeometry geometry;
  scene::SceneSpec spec;
};

std::vector<ManifestEntry> read_manifest(const fs::path& path);

/// Scene file names inside each scene directory.
inline constexpr const char* kMicsFile = "mics.wav";
inline constexpr const char* kCleanFile = "clean.wav";
inline constexpr const char* kAmbienceFile = "ambience.wav";
inline constexpr const char* kTargetFile = "target.wav";
inline constexpr const char* kFeatureFile = "features.scrf";

/// "<scene_id>_alpha<alpha with two decimals>.wav"
std::string rendered_name(const std::string& scene_id, double alpha);

/// Synthesizes config.dataset.count scenes into config.paths.output and
/// writes manifest.jsonl there. Returns the manifest path.
fs::path cmd_synth(const RunConfig& config);

/// Writes features.scrf next to each scene's mics.wav. A geometry override
/// replaces the one recorded in the manifest.
void cmd_features(const fs::path& manifest, const std::optional<fs::path>& geometry,
                  const score::ScoreParams& params);

/// Trains on the manifest's "train" and "val" scenes into out_dir.
std::vector<brnet::EpochLog> cmd_train(const fs::path& manifest, const RunConfig& config, const fs::path& out_dir);

/// Renders one mic recording to a stereo float WAV.
void cmd_render(const fs::path& checkpoint, const fs::path& mics, const fs::path& geometry, double alpha,
                const fs::path& out);

/// Renders every scene of a manifest (optionally one split) at each alpha
/// into out_dir, using each scene's recorded geometry.
void cmd_render_manifest(const fs::path& checkpoint, const fs::path& manifest, const std::vector<double>& alphas,
                         const fs::path& out_dir, const std::string& split = "");

/// Scores rendered files against clean + alpha * ambience, writes
/// reports.jsonl, table.txt and table.json into out_dir and returns the
/// table.
metrics::AggregateTable cmd_eval(const fs::path& manifest, const fs::path& rendered_dir,
                                 const std::vector<double>& alphas, const fs::path& out_dir,
                                 const std::string& split = "");

struct RirRequest {
  scene::RoomSpec room;
  Eigen::Vector3d source{1.0, 1.0, 1.5};
  Eigen::Vector3d mic{3.0, 2.0, 1.5};
};

/// Simulates one RIR, writes it as a mono float WAV and returns a JSON
/// summary with the measured Schroeder T60 of the full and clean parts.
nlohmann::json cmd_rir(const RirRequest& request, const fs::path& out);

}  // namespace batkit::cli
