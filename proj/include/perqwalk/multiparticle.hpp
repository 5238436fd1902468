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
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "perqwalk/dynamics.hpp"

namespace perqwalk {

enum class Statistics { Distinguishable, Bosonic, Fermionic };

std::string_view to_string(Statistics s);
Statistics parse_statistics(std::string_view s);

/// Amplitudes over ordered pairs (j, k), stored at index j * n + k.
struct TwoParticleState {
  std::size_t n = 0;
  Eigen::VectorXcd amplitudes;
  Statistics statistics = Statistics::Distinguishable;

  std::complex<double> amplitude(std::size_t j, std::size_t k) const {
    return amplitudes[static_cast<Eigen::Index>(j * n + k)];
  }

  /// psi_a (x) psi_b, not symmetrized.
  static TwoParticleState product(const StateVector& first, const StateVector& second,
                                  Statistics statistics);
};

/// Interaction energy as a function of inter-particle distance, finite support.
struct InteractionSpec {
  std::map<std::size_t, double> values;

  static InteractionSpec none() { return {}; }
  static InteractionSpec on_site(double u) { return InteractionSpec{{{0, u}}}; }
  static InteractionSpec nearest_neighbor(double v) { return InteractionSpec{{{1, v}}}; }

  double at(std::size_t distance) const;
};

/// |j - k|, or the shorter arc on a ring.
std::size_t pair_distance(std::size_t j, std::size_t k, std::size_t n, bool periodic);

/// H (x) I + I (x) H + diag U(d(j, k)) with both factors driven by the same
/// noise sources.
ParametricOperator build_two_particle_operator(const HamiltonianSpec& spec,
                                               const SourceLayout& layout,
                                               const InteractionSpec& interaction);

Eigen::MatrixXd two_particle_hamiltonian(const HamiltonianSpec& spec,
                                         std::span<const double> source_values,
                                         const InteractionSpec& interaction,
                                         const DomainPartition* domains = nullptr);

/// Projects onto the exchange-symmetric (bosons) or antisymmetric (fermions)
/// sector and renormalizes. Throws std::invalid_argument if the projection
/// vanishes.
TwoParticleState symmetrize(const TwoParticleState& state);

/// Norm of the component outside the state's exchange sector (0 for
/// distinguishable particles).
double exchange_leakage(const TwoParticleState& state);

std::vector<TwoParticleState> evolve_two_particle(
    const HamiltonianSpec& spec, const NoiseRealization& noise,
    const InteractionSpec& interaction, const TwoParticleState& psi0,
    std::span<const double> sample_times, PropagationMethod method = PropagationMethod::Auto);

/// Marginal position distribution of particle 0 or 1.
Eigen::VectorXd marginal(const TwoParticleState& state, int particle);

/// Probability that both particles sit on the same node.
double diagonal_mass(const TwoParticleState& state);

struct TwoParticleEnsembleResult {
  std::vector<double> sample_times;
  std::size_t trajectories = 0;
  std::vector<Eigen::VectorXd> marginal_first;
  std::vector<Eigen::VectorXd> marginal_second;
  std::vector<double> diagonal_mass;
  std::vector<double> diagonal_mass_stderr;
  std::vector<double> mean_distance;
  Eigen::MatrixXd joint_final;  // p(j, k) at the last sample time
};

TwoParticleEnsembleResult ensemble_two_particle(const HamiltonianSpec& spec,
                                                const InteractionSpec& interaction,
                                                const TwoParticleState& psi0,
                                                const EnsembleOptions& options);

}  // namespace perqwalk
