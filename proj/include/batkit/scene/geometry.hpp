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
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace batkit::scene {

/// Microphone positions in the array-local frame (metres). The x axis points
/// to azimuth 0, the y axis to azimuth 90 degrees.
struct ArrayGeometry {
  std::vector<Eigen::Vector3d> mic_positions;
  int reference_index = 0;

  int mic_count() const { return static_cast<int>(mic_positions.size()); }

  /// Channel order with the reference first, others in ascending index.
  std::vector<int> channel_order() const;

  /// Throws std::invalid_argument unless M >= 2, positions are pairwise
  /// distinct and the reference index is valid.
  void validate() const;
};

ArrayGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json geometry_to_json(const ArrayGeometry& g);

/// Reads {"mics": [[x,y,z],...], "reference_index": 0}.
ArrayGeometry load_geometry(const std::filesystem::path& path);
void save_geometry(const std::filesystem::path& path, const ArrayGeometry& g);

/// Uniform circular array of `count` mics with the given radius.
ArrayGeometry circular_array(int count, double radius);

}  // namespace batkit::scene
