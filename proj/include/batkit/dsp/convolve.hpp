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

#include <Eigen/Core>

namespace batkit::dsp {

/// Full linear convolution, length a.size() + b.size() - 1. Switches to an
/// FFT implementation for long inputs.
Eigen::VectorXd convolve(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b);

/// Convolution truncated to the first `length` samples.
Eigen::VectorXd convolve(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b,
                         Eigen::Index length);

double mean_power(const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace batkit::dsp
