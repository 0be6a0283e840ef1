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

#include "batkit/scene/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "batkit/error.hpp"

namespace batkit::scene {

std::vector<int> ArrayGeometry::channel_order() const {
  std::vector<int> order{reference_index};
  for (int m = 0; m < mic_count(); ++m) {
    if (m != reference_index) order.push_back(m);
  }
  return order;
}

void ArrayGeometry::validate() const {
  if (mic_count() < 2) throw std::invalid_argument("array geometry needs at least 2 mics");
  if (reference_index < 0 || reference_index >= mic_count()) {
    throw std::invalid_argument("array geometry: reference_index out of range");
  }
  for (int a = 0; a < mic_count(); ++a) {
    if (!mic_positions[a].allFinite()) {
      throw std::invalid_argument("array geometry: non-finite mic position");
    }
    for (int b = a + 1; b < mic_count(); ++b) {
      if (mic_positions[a] == mic_positions[b]) {
        throw std::invalid_argument("array geometry: mics " + std::to_string(a) +
                                    " and " + std::to_string(b) + " coincide");
      }
    }
  }
}

ArrayGeometry geometry_from_json(const nlohmann::json& j) {
  ArrayGeometry g;
  try {
    for (const auto& p : j.at("mics")) {
      if (p.size() != 3) throw FormatError("geometry: each mic needs 3 coordinates");
      g.mic_positions.emplace_back(p[0].get<double>(), p[1].get<double>(),
                                   p[2].get<double>());
    }
    g.reference_index = j.value("reference_index", 0);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("geometry: ") + e.what());
  }
  g.validate();
  return g;
}

nlohmann::json geometry_to_json(const ArrayGeometry& g) {
  nlohmann::json mics = nlohmann::json::array();
  for (const auto& p : g.mic_positions) mics.push_back({p.x(), p.y(), p.z()});
  return {{"mics", mics}, {"reference_index", g.reference_index}};
}

ArrayGeometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("geometry file not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return geometry_from_json(j);
}

void save_geometry(const std::filesystem::path& path, const ArrayGeometry& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write geometry: " + path.string());
  out << geometry_to_json(g).dump(2) << '\n';
}

ArrayGeometry circular_array(int count, double radius) {
  ArrayGeometry g;
  for (int m = 0; m < count; ++m) {
    const double phi = 2.0 * std::numbers::pi * m / count;
    g.mic_positions.emplace_back(radius * std::cos(phi), radius * std::sin(phi), 0.0);
  }
  return g;
}

}  // namespace batkit::scene
