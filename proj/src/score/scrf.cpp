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

#include "batkit/score/scrf.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "batkit/error.hpp"

namespace batkit::score {
namespace {

static_assert(std::endian::native == std::endian::little);

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

void write_scrf(const std::filesystem::path& path, const ScoreFeature& feat) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write feature file: " + path.string());
  out.write("SCRF", 4);
  put<std::uint16_t>(out, kScrfVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(feat.frames()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(feat.bands));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(feat.looks));
  for (Eigen::Index i = 0; i < feat.score.size(); ++i) put<float>(out, static_cast<float>(feat.score.data()[i]));
  for (Eigen::Index i = 0; i < feat.ref_logspec.size(); ++i) {
    put<float>(out, static_cast<float>(feat.ref_logspec.data()[i]));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

ScoreFeature read_scrf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("feature file not found: " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 4 + 2 + 12;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), "SCRF", 4) != 0) {
    throw FormatError(path.string() + ": not a SCRF file");
  }
  std::uint16_t version;
  std::uint32_t dims[3];
  std::memcpy(&version, bytes.data() + 4, 2);
  std::memcpy(dims, bytes.data() + 6, 12);
  if (version != kScrfVersion) throw FormatError(path.string() + ": unsupported SCRF version");
  const std::size_t frames = dims[0], bands = dims[1], looks = dims[2];
  const std::size_t count = frames * bands * looks + frames * bands;
  if (bytes.size() != kHeader + 4 * count) throw FormatError(path.string() + ": truncated SCRF payload");

  ScoreFeature feat;
  feat.bands = static_cast<int>(bands);
  feat.looks = static_cast<int>(looks);
  feat.score.resize(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(bands * looks));
  feat.ref_logspec.resize(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(bands));
  const char* p = bytes.data() + kHeader;
  for (Eigen::Index i = 0; i < feat.score.size(); ++i, p += 4) {
    float v;
    std::memcpy(&v, p, 4);
    feat.score.data()[i] = v;
  }
  for (Eigen::Index i = 0; i < feat.ref_logspec.size(); ++i, p += 4) {
    float v;
    std::memcpy(&v, p, 4);
    feat.ref_logspec.data()[i] = v;
  }
  return feat;
}

}  // namespace batkit::score
