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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "perqwalk/dynamics.hpp"
#include "perqwalk/graph.hpp"
#include "perqwalk/noise.hpp"
#include "perqwalk/observables.hpp"

namespace perqwalk {

struct SearchProblem {
  Graph graph;
  NodeIndex target = 0;
  double coupling = 0.0;  // 0 selects the default 1/N
  NoiseSpec noise;        // independent RTN per edge; nu = 0 for noiseless

  double effective_coupling() const;
  HamiltonianSpec hamiltonian_spec() const;
};

struct SearchResult {
  std::vector<double> t_grid;
  std::vector<double> p_w;
  std::vector<double> p_w_stderr;
  std::size_t t_opt_index = 0;
  double t_opt = 0.0;
  double p_succ = 0.0;
  double p_succ_stderr = 0.0;
  double average_running_time = 0.0;  // t_opt / p_succ
  std::size_t trajectories = 0;
  double coupling = 0.0;
};

/// -J L - |w><w|.
Eigen::MatrixXd search_hamiltonian(const Graph& g, double coupling, NodeIndex target);

/// Closed-form noiseless success probability on the complete graph with J = 1/N.
double grover_probability(std::size_t n, double t);

/// (pi/2) sqrt(N).
double grover_time(std::size_t n);

/// Complete graph restricted to {|r>, |w>}.
Eigen::Matrix2d reduced_complete_hamiltonian(std::size_t n);

/// Star graph with an external target and J = 1, restricted to {|c>, |w>, |r>}.
Eigen::Matrix3d reduced_star_hamiltonian(std::size_t n);

/// p_w(t) from a small reduced Hamiltonian and initial state, by exact
/// eigendecomposition; `target` is the basis index of |w>.
std::vector<double> reduced_target_probability(const Eigen::MatrixXd& h,
                                               const Eigen::VectorXd& initial,
                                               Eigen::Index target,
                                               std::span<const double> times);

/// `points` uniform samples on [0, span_factor * (pi/2) sqrt(N)].
std::vector<double> default_search_grid(std::size_t n, std::size_t points = 400,
                                        double span_factor = 3.0);

struct SearchRunOptions {
  std::size_t trajectories = 1;
  std::vector<double> t_grid;  // empty selects default_search_grid
  std::size_t threads = 1;
  PropagationMethod method = PropagationMethod::Auto;
};

/// Ensemble-averaged p_w(t) from the uniform superposition. p_succ is the
/// grid maximum of the averaged curve (values within 1e-9 of the maximum tie;
/// ties go to the earlier time).
/// Throws std::invalid_argument unless the grid starts at 0 and reaches
/// 2 * (pi/2) sqrt(N).
SearchResult run_noisy_search(const SearchProblem& problem, const SearchRunOptions& options);

/// Repeats run_noisy_search for `count` log-spaced couplings between lo and
/// hi and keeps the one with the smallest average running time.
SearchResult optimize_coupling(SearchProblem problem, const SearchRunOptions& options, double lo,
                               double hi, std::size_t count = 10);

/// Log-log slope of running time against N, with its standard error.
/// Throws on fewer than three points or non-positive values.
LineFit scaling_exponent(std::span<const double> sizes, std::span<const double> times);

}  // namespace perqwalk
