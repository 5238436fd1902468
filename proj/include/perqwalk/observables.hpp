// Copyright 2026 The perqwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace perqwalk {

struct PositionDistribution {
  Eigen::VectorXd probabilities;
  double time = 0.0;
};

/// |amplitude_k|^2. Throws std::invalid_argument if the state norm deviates
/// from 1 by more than 1e-8.
PositionDistribution position_distribution(const Eigen::VectorXcd& state, double time = 0.0);

/// Signed displacement of node k from origin. On a ring of n nodes it is the
/// shortest signed arc, mapped into (-n/2, n/2].
double signed_displacement(std::size_t k, std::size_t origin, std::size_t n, bool periodic);

/// sum_k p_k (x_k - <x>)^2 with x_k the signed displacement from origin.
double variance(const PositionDistribution& dist, std::size_t origin, bool periodic);

/// J_0(x) ... J_max_order(x) by Miller's downward recurrence, normalized
/// with J_0 + 2 sum_k J_2k = 1.
std::vector<double> bessel_j_sequence(std::size_t max_order, double x);

/// Noiseless infinite-line distribution p(k) = J_|k|(2 j0 t)^2 laid out on
/// n nodes around origin (ring displacements when periodic). Throws
/// std::invalid_argument if the probability mass that falls outside the
/// represented displacements exceeds 1e-12.
PositionDistribution bessel_distribution(std::size_t n, std::size_t origin, double t,
                                         double j0 = 1.0, bool periodic = true);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Least-squares fit of log(y) against log(x). Throws on fewer than two
/// points or non-positive values.
LineFit loglog_fit(std::span<const double> x, std::span<const double> y);

enum class Regime { Ballistic, Diffusive, Localized, Crossover };

std::string_view to_string(Regime r);

struct RegimeFit {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  Regime regime = Regime::Crossover;
};

/// Log-log slope of variance(t) over the final half of the time window:
/// ballistic above 1.6, diffusive in [0.7, 1.3], localized below 0.4.
/// Needs at least 5 points in the window with t > 0 and positive variances.
RegimeFit classify_regime(std::span<const double> times, std::span<const double> variances);

}  // namespace perqwalk
