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

#include "batkit/cli/config.hpp"

#include <fstream>
#include <stdexcept>

#include "batkit/error.hpp"

namespace batkit::cli {
namespace {

using nlohmann::json;

/// Copies `overlay` onto `base`, refusing keys that base lacks.
void merge_known(json& base, const json& overlay, const std::string& where) {
  if (!overlay.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [key, value] : overlay.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw std::invalid_argument("config: unknown key '" + path + "'");
    if (base[key].is_object()) {
      merge_known(base[key], value, path);
    } else {
      base[key] = value;
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  if (dataset.count < 1) throw std::invalid_argument("config: dataset.count must be >= 1");
  if (!(dataset.duration > 0.0)) throw std::invalid_argument("config: dataset.duration must be positive");
  if (!(dataset.validation_fraction >= 0.0 && dataset.validation_fraction < 1.0)) {
    throw std::invalid_argument("config: dataset.validation_fraction must lie in [0, 1)");
  }
  if (dataset.split.empty()) throw std::invalid_argument("config: dataset.split is empty");
  if (score.radius < 0 || score.looks < 1) throw std::invalid_argument("config: invalid score parameters");
  if (score.looks != train.dims.looks) throw std::invalid_argument("config: score.looks must match the model");
  for (double a : eval.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("config: eval.alphas must lie in [0, 1]");
  }
  train.validate();
}

nlohmann::json default_config_json() {
  const RunConfig d;
  return {{"paths",
           {{"corpus", d.paths.corpus},
            {"hrir", d.paths.hrir},
            {"geometry", d.paths.geometry},
            {"output", d.paths.output}}},
          {"dataset",
           {{"count", d.dataset.count},
            {"seed", d.dataset.seed},
            {"duration", d.dataset.duration},
            {"validation_fraction", d.dataset.validation_fraction},
            {"split", d.dataset.split}}},
          {"train", json(d.train)},
          {"score", {{"radius", d.score.radius}, {"looks", d.score.looks}}},
          {"eval", {{"alphas", d.eval.alphas}}}};
}

void apply_override(nlohmann::json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw std::invalid_argument("--set: unknown key '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw std::invalid_argument("--set: '" + key + "' names a section, not a value");
  *node = value;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    const auto& p = j.at("paths");
    c.paths.corpus = p.at("corpus").get<std::string>();
    c.paths.hrir = p.at("hrir").get<std::string>();
    c.paths.geometry = p.at("geometry").get<std::string>();
    c.paths.output = p.at("output").get<std::string>();
    const auto& d = j.at("dataset");
    c.dataset.count = d.at("count").get<int>();
    c.dataset.seed = d.at("seed").get<std::uint64_t>();
    c.dataset.duration = d.at("duration").get<double>();
    c.dataset.validation_fraction = d.at("validation_fraction").get<double>();
    c.dataset.split = d.at("split").get<std::string>();
    c.train = j.at("train").get<brnet::TrainConfig>();
    c.score.radius = j.at("score").at("radius").get<int>();
    c.score.looks = j.at("score").at("looks").get<int>();
    c.eval.alphas = j.at("eval").at("alphas").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  json config = default_config_json();
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw NotFoundError("config file not found: " + file.string());
    const json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded()) throw std::invalid_argument("config: " + file.string() + " is not valid JSON");
    merge_known(config, parsed, "");
  }
  for (const auto& o : overrides) apply_override(config, o);
  return config_from_json(config);
}

}  // namespace batkit::cli
