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

#include <nlohmann/json_fwd.hpp>

#include "batkit/brnet/grad.hpp"
#include "batkit/dsp/erb.hpp"
#include "batkit/score/score.hpp"
#include "batkit/types.hpp"

namespace batkit::brnet {

enum class Precision { kFloat32, kFloat64 };

struct TrainConfig {
  double learning_rate = 1e-3;
  double grad_clip_norm = 3.0;
  int lr_halving_patience = 3;
  std::vector<double> alpha_choices{0.0, 0.3, 0.5, 0.7, 1.0};
  double compression = 0.3;
  int epochs = 20;
  int batch_size = 1;
  int segment_frames = 32;  // training items are cut into segments this long; 0 keeps them whole
  std::uint64_t seed = 0;
  Precision precision = Precision::kFloat32;
  ModelDims dims;
  bool resume = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// One line of train_log.jsonl.
struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;  // rate in effect during the epoch
  bool lr_halved = false;
  std::vector<double> alphas;  // per training step, in order
  double max_grad_norm = 0.0;
  double max_clipped_norm = 0.0;
  bool improved = false;
};

void to_json(nlohmann::json& j, const EpochLog& e);
void from_json(const nlohmann::json& j, EpochLog& e);

/// Cuts every item into consecutive segments of `frames` frames; the
/// remainder joins the last segment. Items shorter than 2 * frames stay whole.
template <typename Scalar>
std::vector<TrainItem<Scalar>> split_segments(const std::vector<TrainItem<Scalar>>& items, int frames);

template <typename Scalar>
struct TrainingData {
  std::vector<TrainItem<Scalar>> train;
  std::vector<TrainItem<Scalar>> validation;
};

/// Builds a training item from a SCORE feature, the reference-mic signal and
/// the binaural target stems.
template <typename Scalar>
TrainItem<Scalar> make_train_item(const score::ScoreFeature& feature, const Signal& reference,
                                  const BinauralPair& clean, const BinauralPair& ambience);

/// Trains from `data` and writes best.brn, last.brn, state.bin and
/// train_log.jsonl into out_dir. With config.resume and an existing state.bin
/// the run continues after the last completed epoch and produces the same
/// subsequent epochs as an uninterrupted run.
template <typename Scalar>
std::vector<EpochLog> train(const TrainingData<Scalar>& data, const TrainConfig& config,
                            const dsp::ErbFilterbank& fb, const std::filesystem::path& out_dir,
                            int stop_after_epoch = -1);

/// Gradient norm clipping in place. Returns the norm after clipping, which
/// never exceeds max_norm.
template <typename Scalar>
double clip_gradient(ModelParams<Scalar>& grad, double max_norm, double* norm_before = nullptr);

}  // namespace batkit::brnet
