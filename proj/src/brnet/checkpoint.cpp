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

#include "batkit/brnet/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <vector>

#include "batkit/error.hpp"

namespace batkit::brnet {
namespace {

constexpr char kMagic[4] = {'B', 'R', 'N', '1'};
constexpr std::uint16_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

template <typename T>
void put(std::vector<char>& buf, T value) {
  const char* p = reinterpret_cast<const char*>(&value);
  buf.insert(buf.end(), p, p + sizeof(T));
}

class Reader {
 public:
  Reader(const std::vector<char>& data, const std::filesystem::path& path) : data_(data), path_(path) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == data_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("checkpoint " + path_.string() + ": " + what);
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("truncated at byte " + std::to_string(pos_));
  }

  const std::vector<char>& data_;
  std::filesystem::path path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params) {
  std::vector<char> buf(kMagic, kMagic + 4);
  put<std::uint16_t>(buf, kVersion);
  const ModelDims& d = params.dims;
  for (int v : {d.hidden, d.bands, d.looks, d.taps, d.df_bins}) put<std::uint32_t>(buf, static_cast<std::uint32_t>(v));
  const auto tensors = params.tensors();
  const auto& names = ModelParams<float>::tensor_names();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    const Matrix<float>& m = *tensors[t];
    put<std::uint16_t>(buf, static_cast<std::uint16_t>(names[t].size()));
    buf.insert(buf.end(), names[t].begin(), names[t].end());
    if (ModelParams<float>::is_vector(names[t])) {
      put<std::uint8_t>(buf, 1);
      put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.rows()));
    } else {
      put<std::uint8_t>(buf, 2);
      put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.rows()));
      put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.cols()));
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) put<float>(buf, m(r, c));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

ModelParams<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("checkpoint not found: " + path.string());
  const std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(data, path);
  if (r.get_string(4) != std::string(kMagic, 4)) r.fail("bad magic");
  const auto version = r.get<std::uint16_t>();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  ModelDims dims;
  for (int* v : {&dims.hidden, &dims.bands, &dims.looks, &dims.taps, &dims.df_bins}) {
    const auto x = r.get<std::uint32_t>();
    if (x == 0 || x > (1u << 20)) r.fail("implausible model dimension " + std::to_string(x));
    *v = static_cast<int>(x);
  }
  ModelParams<float> params = ModelParams<float>::zeros(dims);
  const auto tensors = params.tensors();
  const auto& names = ModelParams<float>::tensor_names();
  std::set<std::string> seen;
  while (!r.done()) {
    const std::string name = r.get_string(r.get<std::uint16_t>());
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) r.fail("unknown tensor '" + name + "'");
    if (!seen.insert(name).second) r.fail("duplicate tensor '" + name + "'");
    Matrix<float>& m = *tensors[static_cast<std::size_t>(it - names.begin())];
    const auto rank = r.get<std::uint8_t>();
    const bool vector = ModelParams<float>::is_vector(name);
    if (rank != (vector ? 1 : 2)) r.fail("tensor '" + name + "' has rank " + std::to_string(rank));
    const auto rows = r.get<std::uint32_t>();
    const auto cols = vector ? 1u : r.get<std::uint32_t>();
    if (rows != m.rows() || cols != m.cols()) {
      r.fail("tensor '" + name + "' has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
             ", expected " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.get<float>();
    }
  }
  for (const auto& name : names) {
    if (!seen.count(name)) r.fail("missing tensor '" + name + "'");
  }
  if (!params.all_finite()) r.fail("non-finite parameter values");
  return params;
}

}  // namespace batkit::brnet
