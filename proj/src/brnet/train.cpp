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

#include "batkit/brnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "batkit/brnet/checkpoint.hpp"
#include "batkit/dsp/stft.hpp"
#include "batkit/error.hpp"
#include "batkit/parallel.hpp"

namespace batkit::brnet {
namespace fs = std::filesystem;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be positive");
  if (!(grad_clip_norm > 0.0)) throw std::invalid_argument("train: grad_clip_norm must be positive");
  if (lr_halving_patience < 1) throw std::invalid_argument("train: lr_halving_patience must be >= 1");
  if (!(compression > 0.0 && compression <= 1.0)) throw std::invalid_argument("train: compression must lie in (0, 1]");
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (segment_frames < 0) throw std::invalid_argument("train: segment_frames must be >= 0");
  if (alpha_choices.empty()) throw std::invalid_argument("train: alpha_choices is empty");
  for (double a : alpha_choices) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("train: alpha_choices must lie in [0, 1]");
  }
  dims.validate();
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"learning_rate", c.learning_rate},
       {"grad_clip_norm", c.grad_clip_norm},
       {"lr_halving_patience", c.lr_halving_patience},
       {"alpha_choices", c.alpha_choices},
       {"compression", c.compression},
       {"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"segment_frames", c.segment_frames},
       {"seed", c.seed},
       {"precision", c.precision == Precision::kFloat64 ? "f64" : "f32"},
       {"hidden", c.dims.hidden},
       {"resume", c.resume}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.grad_clip_norm = j.value("grad_clip_norm", c.grad_clip_norm);
  c.lr_halving_patience = j.value("lr_halving_patience", c.lr_halving_patience);
  c.alpha_choices = j.value("alpha_choices", c.alpha_choices);
  c.compression = j.value("compression", c.compression);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.segment_frames = j.value("segment_frames", c.segment_frames);
  c.seed = j.value("seed", c.seed);
  c.dims.hidden = j.value("hidden", c.dims.hidden);
  c.resume = j.value("resume", c.resume);
  const std::string precision = j.value("precision", std::string("f32"));
  if (precision == "f32") {
    c.precision = Precision::kFloat32;
  } else if (precision == "f64") {
    c.precision = Precision::kFloat64;
  } else {
    throw std::invalid_argument("train: precision must be \"f32\" or \"f64\", got \"" + precision + "\"");
  }
}

void to_json(nlohmann::json& j, const EpochLog& e) {
  j = {{"epoch", e.epoch},         {"train_loss", e.train_loss},
       {"val_loss", e.val_loss},   {"lr", e.lr},
       {"lr_halved", e.lr_halved}, {"alphas", e.alphas},
       {"max_grad_norm", e.max_grad_norm}, {"max_clipped_norm", e.max_clipped_norm},
       {"improved", e.improved}};
}

void from_json(const nlohmann::json& j, EpochLog& e) {
  e.epoch = j.at("epoch").get<int>();
  e.train_loss = j.at("train_loss").get<double>();
  e.val_loss = j.at("val_loss").get<double>();
  e.lr = j.at("lr").get<double>();
  e.lr_halved = j.value("lr_halved", false);
  e.alphas = j.value("alphas", std::vector<double>{});
  e.max_grad_norm = j.value("max_grad_norm", 0.0);
  e.max_clipped_norm = j.value("max_clipped_norm", 0.0);
  e.improved = j.value("improved", false);
}

template <typename Scalar>
TrainItem<Scalar> make_train_item(const score::ScoreFeature& feature, const Signal& reference,
                                  const BinauralPair& clean, const BinauralPair& ambience) {
  TrainItem<Scalar> item;
  item.input = build_input<Scalar>(feature);
  const auto spectrum = [&](const Signal& x) {
    const dsp::Spectrogram s = dsp::stft(x);
    if (s.frames() != feature.frames()) {
      throw std::invalid_argument("train item: signal gives " + std::to_string(s.frames()) +
                                  " frames, feature has " + std::to_string(feature.frames()));
    }
    return ComplexMatrix<Scalar>(s.data.cast<std::complex<Scalar>>());
  };
  item.ref = spectrum(reference);
  item.clean = {spectrum(clean.left), spectrum(clean.right)};
  item.ambience = {spectrum(ambience.left), spectrum(ambience.right)};
  return item;
}

template <typename Scalar>
std::vector<TrainItem<Scalar>> split_segments(const std::vector<TrainItem<Scalar>>& items, int frames) {
  if (frames < 1) throw std::invalid_argument("split_segments: frames must be >= 1");
  std::vector<TrainItem<Scalar>> out;
  for (const auto& item : items) {
    const Eigen::Index total = item.ref.rows();
    const Eigen::Index count = std::max<Eigen::Index>(1, total / frames);
    for (Eigen::Index s = 0; s < count; ++s) {
      const Eigen::Index begin = s * frames;
      const Eigen::Index len = s + 1 == count ? total - begin : frames;
      TrainItem<Scalar> seg;
      seg.input = item.input.middleCols(begin, len);
      seg.ref = item.ref.middleRows(begin, len);
      for (int e = 0; e < 2; ++e) {
        seg.clean[e] = item.clean[e].middleRows(begin, len);
        seg.ambience[e] = item.ambience[e].middleRows(begin, len);
      }
      out.push_back(std::move(seg));
    }
  }
  return out;
}

template <typename Scalar>
double clip_gradient(ModelParams<Scalar>& grad, double max_norm, double* norm_before) {
  double norm = std::sqrt(grad.squared_norm());
  if (norm_before) *norm_before = norm;
  if (!std::isfinite(norm)) throw TrainingError("non-finite gradient norm");
  // Rounding in Scalar can leave the rescaled norm a hair above the bound;
  // shrink until it is not.
  double scale = max_norm / norm;
  while (norm > max_norm) {
    for (auto* t : grad.tensors()) *t *= static_cast<Scalar>(scale);
    norm = std::sqrt(grad.squared_norm());
    scale = 1.0 - 1e-6;
  }
  return norm;
}

namespace {

constexpr char kStateMagic[4] = {'B', 'R', 'S', 'T'};
constexpr std::uint32_t kStateVersion = 1;

template <typename Scalar>
struct Adam {
  ModelParams<Scalar> m, v;
  std::uint64_t step = 0;

  explicit Adam(const ModelDims& dims) : m(ModelParams<Scalar>::zeros(dims)), v(ModelParams<Scalar>::zeros(dims)) {}

  void update(ModelParams<Scalar>& params, const ModelParams<Scalar>& grad, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++step;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
    auto p = params.tensors();
    auto g = grad.tensors();
    auto mt = m.tensors();
    auto vt = v.tensors();
    for (std::size_t t = 0; t < p.size(); ++t) {
      auto ma = mt[t]->array();
      auto va = vt[t]->array();
      const auto ga = g[t]->array();
      ma = Scalar(b1) * ma + Scalar(1 - b1) * ga;
      va = Scalar(b2) * va + Scalar(1 - b2) * ga.square();
      p[t]->array() -= Scalar(lr) * (ma / Scalar(c1)) / ((va / Scalar(c2)).sqrt() + Scalar(eps));
    }
  }
};

struct Progress {
  int next_epoch = 1;
  double lr = 0.0;
  double best = 0.0;
  bool has_best = false;
  int stagnant = 0;
};

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v, const fs::path& path) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("training state " + path.string() + " is truncated");
}

template <typename Scalar>
void save_state(const fs::path& path, const ModelParams<Scalar>& params, const Adam<Scalar>& adam,
                const Progress& progress, std::uint64_t seed) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(kStateMagic, 4);
    write_raw(out, kStateVersion);
    write_raw(out, static_cast<std::uint32_t>(sizeof(Scalar)));
    const ModelDims& d = params.dims;
    for (int v : {d.hidden, d.bands, d.looks, d.taps, d.df_bins}) write_raw(out, static_cast<std::uint32_t>(v));
    write_raw(out, seed);
    write_raw(out, static_cast<std::int32_t>(progress.next_epoch));
    write_raw(out, progress.lr);
    write_raw(out, progress.best);
    write_raw(out, static_cast<std::uint8_t>(progress.has_best));
    write_raw(out, static_cast<std::int32_t>(progress.stagnant));
    write_raw(out, adam.step);
    for (const auto* set : {&params, &adam.m, &adam.v}) {
      for (const auto* t : set->tensors()) {
        out.write(reinterpret_cast<const char*>(t->data()), static_cast<std::streamsize>(t->size() * sizeof(Scalar)));
      }
    }
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

template <typename Scalar>
void load_state(const fs::path& path, ModelParams<Scalar>& params, Adam<Scalar>& adam, Progress& progress,
                std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("training state not found: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kStateMagic, 4) != 0) throw FormatError(path.string() + ": bad magic");
  std::uint32_t version = 0, scalar_size = 0;
  read_raw(in, version, path);
  read_raw(in, scalar_size, path);
  if (version != kStateVersion) throw FormatError(path.string() + ": unsupported version");
  if (scalar_size != sizeof(Scalar)) throw FormatError(path.string() + ": saved with a different precision");
  ModelDims d;
  for (int* v : {&d.hidden, &d.bands, &d.looks, &d.taps, &d.df_bins}) {
    std::uint32_t x = 0;
    read_raw(in, x, path);
    *v = static_cast<int>(x);
  }
  if (!(d == params.dims)) throw FormatError(path.string() + ": model dimensions differ from the config");
  std::uint64_t saved_seed = 0;
  read_raw(in, saved_seed, path);
  if (saved_seed != seed) throw FormatError(path.string() + ": saved with seed " + std::to_string(saved_seed));
  std::int32_t next_epoch = 0, stagnant = 0;
  std::uint8_t has_best = 0;
  read_raw(in, next_epoch, path);
  read_raw(in, progress.lr, path);
  read_raw(in, progress.best, path);
  read_raw(in, has_best, path);
  read_raw(in, stagnant, path);
  read_raw(in, adam.step, path);
  progress.next_epoch = next_epoch;
  progress.has_best = has_best != 0;
  progress.stagnant = stagnant;
  for (auto* set : {&params, &adam.m, &adam.v}) {
    for (auto* t : set->tensors()) {
      in.read(reinterpret_cast<char*>(t->data()), static_cast<std::streamsize>(t->size() * sizeof(Scalar)));
      if (!in) throw FormatError("training state " + path.string() + " is truncated");
    }
  }
}

std::vector<EpochLog> read_log(const fs::path& path, int before_epoch) {
  std::vector<EpochLog> logs;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpochLog e = nlohmann::json::parse(line).get<EpochLog>();
    if (e.epoch < before_epoch) logs.push_back(std::move(e));
  }
  return logs;
}

void write_log(const fs::path& path, const std::vector<EpochLog>& logs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& e : logs) out << nlohmann::json(e).dump() << '\n';
}

/// Mean loss over validation items and every alpha choice.
template <typename Scalar>
double validation_loss(const ModelParams<Scalar>& params, const TrainingData<Scalar>& data,
                       const TrainConfig& config, const dsp::ErbFilterbank& fb) {
  const std::size_t alphas = config.alpha_choices.size();
  std::vector<double> losses(data.validation.size() * alphas);
  parallel_for(losses.size(), [&](std::size_t k) {
    const auto& item = data.validation[k / alphas];
    losses[k] = loss_and_grad(params, item, static_cast<Scalar>(config.alpha_choices[k % alphas]),
                              config.compression, fb);
  });
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(losses.size());
}

}  // namespace

template <typename Scalar>
std::vector<EpochLog> train(const TrainingData<Scalar>& data, const TrainConfig& config,
                            const dsp::ErbFilterbank& fb, const fs::path& out_dir, int stop_after_epoch) {
  config.validate();
  if (data.train.empty()) throw std::invalid_argument("train: training split is empty");
  if (data.validation.empty()) throw std::invalid_argument("train: validation split is empty");
  // Validation always runs on whole items.
  const std::vector<TrainItem<Scalar>> segments =
      config.segment_frames > 0 ? split_segments(data.train, config.segment_frames) : data.train;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const fs::path state_path = out_dir / "state.bin";
  const fs::path log_path = out_dir / "train_log.jsonl";
  ModelParams<Scalar> params = ModelParams<Scalar>::initialized(config.dims, config.seed);
  Adam<Scalar> adam(config.dims);
  Progress progress;
  progress.lr = config.learning_rate;
  std::vector<EpochLog> logs;
  if (config.resume && fs::exists(state_path)) {
    load_state(state_path, params, adam, progress, config.seed);
    logs = read_log(log_path, progress.next_epoch);
  }
  write_log(log_path, logs);

  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = progress.next_epoch; epoch <= config.epochs; ++epoch) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> order(segments.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<std::size_t> pick(0, config.alpha_choices.size() - 1);
    std::vector<double> alphas(order.size());
    for (double& a : alphas) a = config.alpha_choices[pick(rng)];

    EpochLog log;
    log.epoch = epoch;
    log.lr = progress.lr;
    log.alphas = alphas;
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      std::vector<ModelParams<Scalar>> grads(count, ModelParams<Scalar>::zeros(config.dims));
      std::vector<double> losses(count);
      parallel_for(count, [&](std::size_t k) {
        losses[k] = loss_and_grad(params, segments[order[start + k]], static_cast<Scalar>(alphas[start + k]),
                                  config.compression, fb, &grads[k]);
      });
      // Fixed reduction order keeps results independent of the thread count.
      for (std::size_t k = 1; k < count; ++k) {
        auto dst = grads[0].tensors();
        const auto src = grads[k].tensors();
        for (std::size_t t = 0; t < dst.size(); ++t) *dst[t] += *src[t];
      }
      for (double l : losses) loss_sum += l;
      double norm_before = 0.0;
      const double norm_after = clip_gradient(grads[0], config.grad_clip_norm, &norm_before);
      log.max_grad_norm = std::max(log.max_grad_norm, norm_before);
      log.max_clipped_norm = std::max(log.max_clipped_norm, norm_after);
      adam.update(params, grads[0], progress.lr);
      if (!params.all_finite()) throw TrainingError("non-finite parameters after step in epoch " + std::to_string(epoch));
    }
    log.train_loss = loss_sum / static_cast<double>(order.size());
    log.val_loss = validation_loss(params, data, config, fb);

    if (!progress.has_best || log.val_loss < progress.best) {
      progress.best = log.val_loss;
      progress.has_best = true;
      progress.stagnant = 0;
      log.improved = true;
      save_checkpoint(out_dir / "best.brn", params.template cast<float>());
    } else if (++progress.stagnant >= config.lr_halving_patience) {
      progress.lr *= 0.5;
      progress.stagnant = 0;
      log.lr_halved = true;
    }
    save_checkpoint(out_dir / "last.brn", params.template cast<float>());
    progress.next_epoch = epoch + 1;
    save_state(state_path, params, adam, progress, config.seed);
    logs.push_back(log);
    std::ofstream(log_path, std::ios::app) << nlohmann::json(log).dump() << '\n';
    if (epoch == stop_after_epoch) break;
  }
  return logs;
}

template TrainItem<float> make_train_item<float>(const score::ScoreFeature&, const Signal&, const BinauralPair&,
                                                 const BinauralPair&);
template TrainItem<double> make_train_item<double>(const score::ScoreFeature&, const Signal&, const BinauralPair&,
                                                   const BinauralPair&);
template std::vector<TrainItem<float>> split_segments<float>(const std::vector<TrainItem<float>>&, int);
template std::vector<TrainItem<double>> split_segments<double>(const std::vector<TrainItem<double>>&, int);
template double clip_gradient<float>(ModelParams<float>&, double, double*);
template double clip_gradient<double>(ModelParams<double>&, double, double*);
template std::vector<EpochLog> train<float>(const TrainingData<float>&, const TrainConfig&, const dsp::ErbFilterbank&,
                                            const fs::path&, int);
template std::vector<EpochLog> train<double>(const TrainingData<double>&, const TrainConfig&,
                                             const dsp::ErbFilterbank&, const fs::path&, int);

}  // namespace batkit::brnet
