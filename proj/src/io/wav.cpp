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

#include "batkit/io/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "batkit/error.hpp"

namespace batkit::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

Wav read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open WAV file: " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& what) {
    return FormatError(path.string() + ": " + what);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = load<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a truncated data chunk length written by streaming encoders.
      if (std::memcmp(chunk, "data", 4) != 0) throw fail("truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw fail("fmt chunk too small");
      format = load<std::uint16_t>(chunk + 8);
      channels = load<std::uint16_t>(chunk + 10);
      rate = load<std::uint32_t>(chunk + 12);
      bits = load<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) throw fail("extensible fmt chunk too small");
        format = load<std::uint16_t>(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
    }
    pos = body + size + (size & 1u);
  }
  if (channels == 0) throw fail("missing fmt chunk");
  if (data == nullptr) throw fail("missing data chunk");
  if (channels > 16) throw fail("more than 16 channels");

  Wav wav;
  wav.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    wav.format = WavFormat::kPcm16;
  } else if (format == kFormatFloat && bits == 32) {
    wav.format = WavFormat::kFloat32;
  } else {
    throw fail("unsupported sample format (need 16-bit PCM or 32-bit float)");
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  wav.samples.resize(static_cast<Eigen::Index>(frames), channels);
  const std::uint8_t* p = data;
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c, p += width) {
      wav.samples(i, c) = wav.format == WavFormat::kPcm16
                              ? load<std::int16_t>(p) / 32768.0
                              : static_cast<double>(load<float>(p));
    }
  }
  return wav;
}

void write_wav(const std::filesystem::path& path, const MultiSignal& samples,
               int sample_rate, WavFormat format) {
  const auto channels = static_cast<std::uint16_t>(samples.cols());
  if (channels < 1 || channels > 16) {
    throw std::invalid_argument("write_wav: channel count must be in [1, 16]");
  }
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint32_t block = channels * bits / 8;
  const auto data_size = static_cast<std::uint32_t>(samples.rows() * block);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put<std::uint32_t>(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  put<std::uint16_t>(out, channels);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate) * block);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(block));
  put<std::uint16_t>(out, bits);
  put_tag(out, "data");
  put<std::uint32_t>(out, data_size);
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      const double v = samples(i, c);
      if (format == WavFormat::kPcm16) {
        const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        put<std::int16_t>(out, static_cast<std::int16_t>(scaled));
      } else {
        put<float>(out, static_cast<float>(v));
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write WAV file: " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

void write_wav(const std::filesystem::path& path, const BinauralPair& pair,
               int sample_rate, WavFormat format) {
  if (pair.left.size() != pair.right.size()) {
    throw std::invalid_argument("write_wav: left/right length mismatch");
  }
  MultiSignal stereo(pair.left.size(), 2);
  stereo.col(0) = pair.left;
  stereo.col(1) = pair.right;
  write_wav(path, stereo, sample_rate, format);
}

BinauralPair read_binaural(const std::filesystem::path& path) {
  const Wav wav = read_wav(path);
  if (wav.channels() != 2) {
    throw FormatError(path.string() + ": expected 2 channels, found " +
                      std::to_string(wav.channels()));
  }
  return {wav.samples.col(0), wav.samples.col(1)};
}

}  // namespace batkit::io
