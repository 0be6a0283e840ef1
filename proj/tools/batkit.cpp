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

// Command-line entry point: synth, features, train, render, eval, rir.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "batkit/cli/commands.hpp"
#include "batkit/cli/config.hpp"
#include "batkit/error.hpp"

namespace {

namespace fs = std::filesystem;
using batkit::cli::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ConfigArgs {
  std::string file;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override a config value, key=value (repeatable)");
  }
  RunConfig load() const { return batkit::cli::load_config(file, overrides); }
};

Eigen::Vector3d parse_vec3(const std::string& text, const char* what) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": expected x,y,z, got '" + text + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (v.size() != 3) throw std::invalid_argument(std::string(what) + ": expected x,y,z, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batkit: tunable binaural rendering from arbitrary microphone arrays"};
  app.require_subcommand(1);

  ConfigArgs synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "synthesize a scene dataset and manifest");
  synth_cfg.attach(synth);
  synth->add_option("--out", synth_out, "output directory (overrides paths.output)");

  ConfigArgs feat_cfg;
  std::string feat_manifest, feat_geometry;
  auto* features = app.add_subcommand("features", "extract SCORE features for every scene");
  features->add_option("--manifest", feat_manifest, "manifest.jsonl")->required();
  features->add_option("--geometry", feat_geometry, "geometry override (default: per-scene geometry)");
  feat_cfg.attach(features);

  ConfigArgs train_cfg;
  std::string train_manifest, train_out;
  bool train_resume = false;
  auto* train = app.add_subcommand("train", "train the rendering network");
  train->add_option("--manifest", train_manifest, "manifest.jsonl with train and val scenes")->required();
  train->add_option("--out", train_out, "checkpoint directory")->required();
  train->add_flag("--resume", train_resume, "continue from state.bin in the output directory");
  train_cfg.attach(train);

  std::string render_ckpt, render_mics, render_geometry, render_out, render_manifest, render_split;
  std::vector<double> render_alphas;
  auto* render = app.add_subcommand("render", "render binaural audio at a chosen ambience factor");
  render->add_option("--checkpoint", render_ckpt, "model checkpoint (.brn)")->required();
  render->add_option("--alpha", render_alphas, "ambience factor(s) in [0, 1]")->required();
  render->add_option("--mics", render_mics, "multichannel mic recording");
  render->add_option("--geometry", render_geometry, "array geometry JSON for --mics");
  render->add_option("--manifest", render_manifest, "render every scene of a manifest instead");
  render->add_option("--split", render_split, "restrict --manifest rendering to one split");
  render->add_option("--out", render_out, "output WAV (single file) or directory (manifest)")->required();

  std::string eval_manifest, eval_rendered, eval_out, eval_split;
  std::vector<double> eval_alphas;
  ConfigArgs eval_cfg;
  auto* eval = app.add_subcommand("eval", "score rendered scenes and print the summary table");
  eval->add_option("--manifest", eval_manifest, "manifest.jsonl")->required();
  eval->add_option("--rendered", eval_rendered, "directory of rendered WAVs")->required();
  eval->add_option("--alpha", eval_alphas, "ambience factors to evaluate (default: eval.alphas)");
  eval->add_option("--split", eval_split, "restrict evaluation to one split");
  eval->add_option("--out", eval_out, "report directory (default: the rendered directory)");
  eval_cfg.attach(eval);

  std::string rir_room = "6,4,3", rir_source = "1.5,1.5,1.5", rir_mic = "4,2.5,1.5", rir_out = "rir.wav";
  double rir_t60 = 0.4;
  auto* rir = app.add_subcommand("rir", "dump one simulated room impulse response");
  rir->add_option("--room", rir_room, "room dimensions x,y,z in metres")->capture_default_str();
  rir->add_option("--t60", rir_t60, "reverberation time in seconds")->capture_default_str();
  rir->add_option("--source", rir_source, "source position x,y,z")->capture_default_str();
  rir->add_option("--mic", rir_mic, "mic position x,y,z")->capture_default_str();
  rir->add_option("--out", rir_out, "output WAV")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      RunConfig config = synth_cfg.load();
      if (!synth_out.empty()) config.paths.output = synth_out;
      const fs::path manifest = batkit::cli::cmd_synth(config);
      std::cout << manifest.string() << '\n';
    } else if (features->parsed()) {
      const RunConfig config = feat_cfg.load();
      std::optional<fs::path> geometry;
      if (!feat_geometry.empty()) geometry = feat_geometry;
      batkit::cli::cmd_features(feat_manifest, geometry, config.score);
    } else if (train->parsed()) {
      RunConfig config = train_cfg.load();
      if (train_resume) config.train.resume = true;
      const auto logs = batkit::cli::cmd_train(train_manifest, config, train_out);
      for (const auto& l : logs) std::cout << nlohmann::json(l).dump() << '\n';
    } else if (render->parsed()) {
      if (!render_manifest.empty()) {
        batkit::cli::cmd_render_manifest(render_ckpt, render_manifest, render_alphas, render_out, render_split);
      } else {
        if (render_mics.empty() || render_geometry.empty()) {
          throw std::invalid_argument("render: give --mics and --geometry, or --manifest");
        }
        if (render_alphas.size() != 1) throw std::invalid_argument("render: a single --alpha is expected with --mics");
        batkit::cli::cmd_render(render_ckpt, render_mics, render_geometry, render_alphas.front(), render_out);
      }
    } else if (eval->parsed()) {
      const RunConfig config = eval_cfg.load();
      const auto alphas = eval_alphas.empty() ? config.eval.alphas : eval_alphas;
      const fs::path out = eval_out.empty() ? fs::path(eval_rendered) : fs::path(eval_out);
      std::cout << batkit::cli::cmd_eval(eval_manifest, eval_rendered, alphas, out, eval_split).to_text();
    } else if (rir->parsed()) {
      batkit::cli::RirRequest req;
      req.room.dimensions = parse_vec3(rir_room, "--room");
      req.room.t60 = rir_t60;
      req.source = parse_vec3(rir_source, "--source");
      req.mic = parse_vec3(rir_mic, "--mic");
      std::cout << batkit::cli::cmd_rir(req, rir_out).dump(2) << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
