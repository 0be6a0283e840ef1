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

#include "batkit/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "batkit/dsp/stft.hpp"

namespace batkit::metrics {
namespace {

void check_pair(const BinauralPair& p, const char* what) {
  if (p.left.size() != p.right.size()) {
    throw std::invalid_argument(std::string(what) + ": left and right lengths differ");
  }
}

void check_inputs(const BinauralPair& ref, const BinauralPair& est) {
  check_pair(ref, "reference");
  check_pair(est, "estimate");
  if (ref.size() != est.size()) throw std::invalid_argument("metrics: reference and estimate lengths differ");
}

struct EarSpectra {
  dsp::Spectrogram left, right;
};

EarSpectra spectra(const BinauralPair& p) {
  return {dsp::stft(p.left), dsp::stft(p.right)};
}

/// Wraps into (-pi, pi].
double wrap(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::remainder(x, two_pi);
  if (y <= -std::numbers::pi) y += two_pi;
  return y;
}

template <typename ErrorFn>
double weighted_error(const BinauralPair& ref, const BinauralPair& est, Eigen::Index bin_limit, ErrorFn error) {
  check_inputs(ref, est);
  const EarSpectra r = spectra(ref);
  const EarSpectra e = spectra(est);
  const Eigen::Index bins = std::min(bin_limit, r.left.bins());
  double num = 0.0, den = 0.0;
  for (Eigen::Index l = 0; l < r.left.frames(); ++l) {
    for (Eigen::Index f = 0; f < bins; ++f) {
      const double w = std::abs(r.left.data(l, f) * r.right.data(l, f));
      if (w == 0.0) continue;
      num += w * error(r.left.data(l, f), r.right.data(l, f), e.left.data(l, f), e.right.data(l, f));
      den += w;
    }
  }
  if (!(den > 0.0)) throw std::invalid_argument("metrics: reference is silent in the evaluated band");
  return num / den;
}

double ild(const Complex& left, const Complex& right) {
  return 20.0 * std::log10((std::abs(left) + kIldEpsilon) / (std::abs(right) + kIldEpsilon));
}

}  // namespace

double mw_ipde(const BinauralPair& ref, const BinauralPair& est) {
  // Bins strictly below the band limit.
  const auto limit = static_cast<Eigen::Index>(std::ceil(kIpdBandLimitHz * dsp::kFrameSize / kSampleRate));
  return weighted_error(ref, est, limit, [](const Complex& rl, const Complex& rr, const Complex& el, const Complex& er) {
    return std::abs(wrap(std::arg(rl * std::conj(rr)) - std::arg(el * std::conj(er))));
  });
}

double mw_ilde(const BinauralPair& ref, const BinauralPair& est) {
  return weighted_error(ref, est, dsp::kFrameSize / 2 + 1,
                        [](const Complex& rl, const Complex& rr, const Complex& el, const Complex& er) {
                          return std::abs(ild(rl, rr) - ild(el, er));
                        });
}

double msi_sdr(const BinauralPair& ref, const BinauralPair& est) {
  check_inputs(ref, est);
  const double ref_energy = ref.left.squaredNorm() + ref.right.squaredNorm();
  if (!(ref_energy > 0.0)) throw std::invalid_argument("msi_sdr: reference has zero energy");
  const double beta = (est.left.dot(ref.left) + est.right.dot(ref.right)) / ref_energy;
  const double target = beta * beta * ref_energy;
  const double residual = (est.left - beta * ref.left).squaredNorm() + (est.right - beta * ref.right).squaredNorm();
  if (residual <= 0.0) return kSdrCapDb;
  return std::min(kSdrCapDb, 10.0 * std::log10(target / residual));
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  j = {{"scene_id", r.scene_id}, {"geometry_id", r.geometry_id}, {"alpha", r.alpha},
       {"mw_ipde", r.mw_ipde},   {"mw_ilde", r.mw_ilde},         {"msi_sdr", r.msi_sdr}};
}

void from_json(const nlohmann::json& j, MetricReport& r) {
  r.scene_id = j.at("scene_id").get<std::string>();
  r.geometry_id = j.at("geometry_id").get<std::string>();
  r.alpha = j.at("alpha").get<double>();
  r.mw_ipde = j.at("mw_ipde").get<double>();
  r.mw_ilde = j.at("mw_ilde").get<double>();
  r.msi_sdr = j.at("msi_sdr").get<double>();
}

MetricReport evaluate(const BinauralPair& ref, const BinauralPair& est, std::string scene_id, std::string geometry_id,
                      double alpha) {
  MetricReport r;
  r.scene_id = std::move(scene_id);
  r.geometry_id = std::move(geometry_id);
  r.alpha = alpha;
  r.mw_ipde = mw_ipde(ref, est);
  r.mw_ilde = mw_ilde(ref, est);
  r.msi_sdr = msi_sdr(ref, est);
  return r;
}

namespace {

std::string block_label(double alpha) {
  if (std::isnan(alpha)) return "all alphas";
  if (alpha == 1.0) return "I-BAT (alpha = 1.0)";
  if (alpha == 0.5) return "I/E-BAT (alpha = 0.5)";
  if (alpha == 0.0) return "E-BAT (alpha = 0.0)";
  char buf[32];
  std::snprintf(buf, sizeof buf, "alpha = %.2f", alpha);
  return buf;
}

}  // namespace

std::string AggregateTable::to_text() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %-12s %6s %12s %12s %12s\n", "mode", "geometry", "n", "mw-IPDe(rad)",
                "mw-ILDe(dB)", "mSI-SDR(dB)");
  out << line;
  // Blocks ordered as immersive, balanced, enhanced, then the rest by alpha.
  std::vector<GroupRow> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(), [](const GroupRow& a, const GroupRow& b) {
    return std::make_tuple(-a.alpha, a.geometry_id) < std::make_tuple(-b.alpha, b.geometry_id);
  });
  bool first = true;
  double current = -1.0;
  for (const auto& r : sorted) {
    const bool new_block = first || r.alpha != current;
    if (new_block && !first) out << '\n';
    std::snprintf(line, sizeof line, "%-24s %-12s %6d %12.4f %12.4f %12.4f\n",
                  new_block ? block_label(r.alpha).c_str() : "", r.geometry_id.c_str(), r.count, r.mw_ipde, r.mw_ilde,
                  r.msi_sdr);
    out << line;
    first = false;
    current = r.alpha;
  }
  return out.str();
}

void to_json(nlohmann::json& j, const AggregateTable& t) {
  j = nlohmann::json::array();
  for (const auto& r : t.rows) {
    j.push_back({{"geometry_id", r.geometry_id}, {"alpha", r.alpha}, {"count", r.count},
                 {"mw_ipde", r.mw_ipde},         {"mw_ilde", r.mw_ilde}, {"msi_sdr", r.msi_sdr}});
  }
}

AggregateTable aggregate(const std::vector<MetricReport>& reports, const std::vector<std::string>& group_keys) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  bool by_geometry = false, by_alpha = false;
  for (const auto& key : group_keys) {
    if (key == "geometry") {
      by_geometry = true;
    } else if (key == "alpha") {
      by_alpha = true;
    } else {
      throw std::invalid_argument("aggregate: unknown group key '" + key + "'");
    }
  }
  std::map<std::pair<double, std::string>, GroupRow> groups;
  for (const auto& r : reports) {
    if (by_geometry && r.geometry_id.empty()) {
      throw std::invalid_argument("aggregate: report '" + r.scene_id + "' has no geometry_id");
    }
    if (!std::isfinite(r.alpha)) throw std::invalid_argument("aggregate: report '" + r.scene_id + "' has no alpha");
    const double alpha = by_alpha ? r.alpha : 0.0;
    const std::string geometry = by_geometry ? r.geometry_id : "all";
    GroupRow& g = groups[{alpha, geometry}];
    g.alpha = by_alpha ? r.alpha : std::numeric_limits<double>::quiet_NaN();
    g.geometry_id = geometry;
    ++g.count;
    g.mw_ipde += r.mw_ipde;
    g.mw_ilde += r.mw_ilde;
    g.msi_sdr += r.msi_sdr;
  }
  AggregateTable table;
  for (auto& [key, g] : groups) {
    g.mw_ipde /= g.count;
    g.mw_ilde /= g.count;
    g.msi_sdr /= g.count;
    table.rows.push_back(g);
  }
  return table;
}

}  // namespace batkit::metrics
