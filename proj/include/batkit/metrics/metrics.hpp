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

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "batkit/types.hpp"

namespace batkit::metrics {

inline constexpr double kIpdBandLimitHz = 1500.0;
inline constexpr double kIldEpsilon = 1e-9;
inline constexpr double kSdrCapDb = 60.0;

/// Magnitude-weighted interaural phase difference error in radians over STFT
/// bins below 1.5 kHz: sum w |wrap(IPD_ref - IPD_est)| / sum w with
/// IPD = arg(Y_L conj(Y_R)) and w = |Y_L Y_R| of the reference.
double mw_ipde(const BinauralPair& ref, const BinauralPair& est);

/// Magnitude-weighted interaural level difference error in dB, full band,
/// ILD = 20 log10((|Y_L| + eps) / (|Y_R| + eps)), same weights as mw_ipde.
double mw_ilde(const BinauralPair& ref, const BinauralPair& est);

/// Scale-invariant SDR over the concatenated [left; right] signal with one
/// shared scale, capped at +60 dB.
double msi_sdr(const BinauralPair& ref, const BinauralPair& est);

struct MetricReport {
  std::string scene_id;
  std::string geometry_id;
  double alpha = 0.0;
  double mw_ipde = 0.0;
  double mw_ilde = 0.0;
  double msi_sdr = 0.0;
};

void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);

/// Evaluates all three metrics.
MetricReport evaluate(const BinauralPair& ref, const BinauralPair& est, std::string scene_id,
                      std::string geometry_id, double alpha);

struct GroupRow {
  std::string geometry_id;
  double alpha = 0.0;
  int count = 0;
  double mw_ipde = 0.0;
  double mw_ilde = 0.0;
  double msi_sdr = 0.0;
};

struct AggregateTable {
  std::vector<GroupRow> rows;  // sorted by alpha, then geometry

  /// Text layout with one block per alpha: I-BAT (alpha 1), I/E-BAT
  /// (alpha 0.5), E-BAT (alpha 0), other alphas labelled numerically.
  std::string to_text() const;
};

void to_json(nlohmann::json& j, const AggregateTable& t);

/// Mean of each metric per group. Group keys are any of "geometry" and
/// "alpha"; unknown keys and reports with empty grouping metadata throw
/// std::invalid_argument.
AggregateTable aggregate(const std::vector<MetricReport>& reports,
                         const std::vector<std::string>& group_keys = {"geometry", "alpha"});

}  // namespace batkit::metrics
