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

#include "batkit/brnet/render.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "batkit/brnet/checkpoint.hpp"
#include "batkit/brnet/deep_filter.hpp"
#include "batkit/brnet/model.hpp"
#include "batkit/dsp/stft.hpp"
#include "batkit/score/score.hpp"

namespace batkit::brnet {

BinauralPair render(const ModelParams<float>& params, const MultiSignal& mics,
                    const scene::ArrayGeometry& geometry, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("render: alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  geometry.validate();
  if (mics.cols() != geometry.mic_count()) {
    throw std::invalid_argument("render: signal has " + std::to_string(mics.cols()) + " channels, geometry has " +
                                std::to_string(geometry.mic_count()) + " mics");
  }
  std::vector<dsp::Spectrogram> specs;
  specs.reserve(static_cast<std::size_t>(mics.cols()));
  for (Eigen::Index m = 0; m < mics.cols(); ++m) specs.push_back(dsp::stft(mics.col(m)));
  const auto fb = dsp::build_erb_filterbank(params.dims.bands, static_cast<int>(specs[0].bins()), kSampleRate);
  score::ScoreParams sp;
  sp.looks = params.dims.looks;
  const score::ScoreFeature feature = score::extract_score(specs, geometry, fb, sp);
  const ModelOutput<float> out = forward(params, feature, static_cast<float>(alpha));
  const auto ears = apply_output(out, specs[static_cast<std::size_t>(geometry.reference_index)], fb);
  const auto ear = [&](const dsp::Spectrogram& spec) {
    Signal y = Signal::Zero(mics.rows());
    const Signal full = dsp::istft(spec);
    const Eigen::Index n = std::min(full.size(), y.size());
    y.head(n) = full.head(n);
    return y;
  };
  return {ear(ears.first), ear(ears.second)};
}

BinauralPair render(const std::filesystem::path& checkpoint, const MultiSignal& mics,
                    const scene::ArrayGeometry& geometry, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("render: alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  return render(load_checkpoint(checkpoint), mics, geometry, alpha);
}

}  // namespace batkit::brnet
