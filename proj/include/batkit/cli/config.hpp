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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "batkit/brnet/train.hpp"
#include "batkit/score/score.hpp"

namespace batkit::cli {

struct RunConfig {
  struct Paths {
    std::string corpus = "synthetic";  // or a directory with speech/ and music/ WAVs
    std::string hrir = "synthetic";    // or an HRIR index.json
    std::string geometry = "configs/g1.json";
    std::string output = "out";
  } paths;

  struct Dataset {
    int count = 50;
    std::uint64_t seed = 7;
    double duration = 5.0;
    double validation_fraction = 0.2;
    std::string split = "auto";  // "auto" = train/val by fraction, or one split name for every scene
  } dataset;

  brnet::TrainConfig train;
  score::ScoreParams score;

  struct Eval {
    std::vector<double> alphas{0.0, 0.5, 1.0};
  } eval;

  /// Throws std::invalid_argument on out-of-range values. Path existence is
  /// checked by the commands that use each path.
  void validate() const;
};

nlohmann::json default_config_json();

/// Applies "a.b.c=value" to `config`. The value is parsed as JSON when
/// possible and taken as a string otherwise. Unknown keys throw
/// std::invalid_argument.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Defaults, overlaid by the optional JSON file, then by the overrides.
/// Unknown keys anywhere throw std::invalid_argument.
RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

RunConfig config_from_json(const nlohmann::json& j);

}  // namespace batkit::cli
