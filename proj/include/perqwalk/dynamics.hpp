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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "perqwalk/graph.hpp"
#include "perqwalk/noise.hpp"
#include "perqwalk/operator.hpp"
#include "perqwalk/propagate.hpp"

namespace perqwalk {

using StateVector = Eigen::VectorXcd;

/// Noisy walk Hamiltonian on a graph. With base coupling c and strength nu,
///
///   H_jj = c (d_j + nu X_j)          (X_j only with on-site noise)
///   H_jk = -c (1 + nu X_e)           for every edge e = (j, k)
///
/// and an optional noiseless oracle term -|w><w|. For walks c = J0 = 1; for
/// search c is the search coupling J.
struct HamiltonianSpec {
  Graph graph;
  double coupling = 1.0;
  NoiseSpec noise;
  std::optional<NodeIndex> oracle;

  /// Throws std::invalid_argument for bad noise parameters, an oracle node
  /// outside the graph, or spatial domains on a graph that is not a line or
  /// ring.
  void validate() const;
  bool uses_domains() const { return noise.tunneling() && noise.correlation_p > 0.0; }
};

/// Maps edges and nodes onto noise-source indices. Tunneling sources come
/// first (one per domain), then one on-site source per node.
struct SourceLayout {
  std::vector<std::size_t> edge_source;  // indexed by Graph edge index
  std::vector<std::size_t> node_source;  // indexed by node
  std::size_t count = 0;

  /// `domains` partitions the edges in chain order; nullptr means every edge
  /// is independent.
  static SourceLayout make(const HamiltonianSpec& spec, const DomainPartition* domains);
};

/// Everything random about one trajectory.
struct NoiseRealization {
  DomainPartition domains;
  std::vector<RtnTrajectory> sources;
};

/// Draws domains from stream kDomainStream and source s from stream
/// kFirstSourceStream + s of (spec.noise.seed, trajectory).
NoiseRealization sample_realization(const HamiltonianSpec& spec, std::uint64_t trajectory,
                                    double horizon);

ParametricOperator build_operator(const HamiltonianSpec& spec, const SourceLayout& layout);

/// Checks a snapshot of source values against the layout. Silent noise also
/// accepts an empty snapshot, read as all zeros.
std::vector<double> resolve_source_values(const HamiltonianSpec& spec, const SourceLayout& layout,
                                          std::span<const double> source_values);

/// Dense Hamiltonian for a snapshot of source values (one per source of the
/// layout implied by `domains`). Throws on a count mismatch.
Eigen::MatrixXd assemble_hamiltonian(const HamiltonianSpec& spec,
                                     std::span<const double> source_values,
                                     const DomainPartition* domains = nullptr);

/// Propagates psi0 under one noise history and returns the state at each
/// sample time.
std::vector<StateVector> evolve_schedule(const HamiltonianSpec& spec,
                                         const DomainPartition* domains,
                                         const SourceSchedule& schedule, const StateVector& psi0,
                                         std::span<const double> sample_times,
                                         PropagationMethod method = PropagationMethod::Auto);

std::vector<StateVector> evolve_trajectory(const HamiltonianSpec& spec,
                                           const NoiseRealization& noise, const StateVector& psi0,
                                           std::span<const double> sample_times,
                                           PropagationMethod method = PropagationMethod::Auto);

/// Same for any piecewise-constant source model.
template <PiecewiseConstantSource S>
std::vector<StateVector> evolve_trajectory(const HamiltonianSpec& spec,
                                           const DomainPartition* domains,
                                           std::span<const S> sources, const StateVector& psi0,
                                           std::span<const double> sample_times,
                                           PropagationMethod method = PropagationMethod::Auto) {
  return evolve_schedule(spec, domains, make_schedule(sources), psi0, sample_times, method);
}

StateVector localized_state(std::size_t n, NodeIndex j);
StateVector uniform_state(std::size_t n);

/// exp(-(j - n/2)^2 / (2 delta^2)) exp(-i p0 j), normalized.
StateVector gaussian_packet(std::size_t n, double delta, double p0);

struct EnsembleOptions {
  std::size_t trajectories = 1;
  std::vector<double> sample_times;
  NodeIndex origin = 0;                // displacement reference for the variance
  std::optional<NodeIndex> observed;   // node for target probability; defaults to the oracle
  bool accumulate_rho = false;
  std::size_t threads = 1;             // 0 = hardware concurrency
  PropagationMethod method = PropagationMethod::Auto;
};

struct EnsembleResult {
  std::vector<double> sample_times;
  std::size_t trajectories = 0;
  std::vector<Eigen::VectorXd> distribution;  // mean p_k per sample time
  std::vector<double> mean_displacement;
  std::vector<double> variance;               // of the averaged distribution
  std::vector<double> variance_stderr;
  std::vector<double> target_probability;     // empty without an observed node
  std::vector<double> target_probability_stderr;
  std::vector<Eigen::MatrixXcd> rho;          // empty unless requested
};

/// Monte Carlo average over noise (and domain) realizations. Trajectory m
/// draws its noise from (spec.noise.seed, m); results do not depend on
/// options.threads.
EnsembleResult ensemble_average(const HamiltonianSpec& spec, const StateVector& psi0,
                                const EnsembleOptions& options);

}  // namespace perqwalk
