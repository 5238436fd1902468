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

#include "perqwalk/search.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace perqwalk {

namespace {
constexpr double kPeakTieTolerance = 1e-9;
}  // namespace

double SearchProblem::effective_coupling() const {
  return coupling > 0.0 ? coupling : 1.0 / static_cast<double>(graph.node_count());
}

HamiltonianSpec SearchProblem::hamiltonian_spec() const {
  HamiltonianSpec spec;
  spec.graph = graph;
  spec.coupling = effective_coupling();
  spec.noise = noise;
  spec.oracle = target;
  return spec;
}

Eigen::MatrixXd search_hamiltonian(const Graph& g, double coupling, NodeIndex target) {
  if (target >= g.node_count()) {
    throw std::invalid_argument("target node " + std::to_string(target) + " outside graph");
  }
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) {
    throw std::invalid_argument("search coupling must be finite and non-negative");
  }
  Eigen::MatrixXd h = -coupling * laplacian(g);
  const auto w = static_cast<Eigen::Index>(target);
  h(w, w) -= 1.0;
  return h;
}

double grover_probability(std::size_t n, double t) {
  if (n < 2) throw std::invalid_argument("grover_probability needs N >= 2");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  const double root = std::sqrt(static_cast<double>(n));
  const double c = std::cos(t / root);
  const double s = std::sin(t / root);
  return c * c / static_cast<double>(n) + s * s;
}

double grover_time(std::size_t n) {
  return 0.5 * std::numbers::pi * std::sqrt(static_cast<double>(n));
}

Eigen::Matrix2d reduced_complete_hamiltonian(std::size_t n) {
  if (n < 2) throw std::invalid_argument("reduced complete Hamiltonian needs N >= 2");
  const double nn = static_cast<double>(n);
  const double off = -std::sqrt(nn - 1.0);
  Eigen::Matrix2d h;
  h << 1.0, off, off, -1.0;
  return h / nn;
}

Eigen::Matrix3d reduced_star_hamiltonian(std::size_t n) {
  if (n < 3) throw std::invalid_argument("reduced star Hamiltonian needs N >= 3");
  const double nn = static_cast<double>(n);
  const double r = -std::sqrt(nn - 2.0);
  Eigen::Matrix3d h;
  h << nn - 1.0, -1.0, r,
       -1.0, 0.0, 0.0,
       r, 0.0, 1.0;
  return h;
}

std::vector<double> reduced_target_probability(const Eigen::MatrixXd& h,
                                               const Eigen::VectorXd& initial,
                                               Eigen::Index target,
                                               std::span<const double> times) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd c = es.eigenvectors().transpose() * initial;
  const Eigen::VectorXd row = es.eigenvectors().row(target).transpose();
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    std::complex<double> amp = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      amp += row[k] * c[k] * std::polar(1.0, -es.eigenvalues()[k] * t);
    }
    out.push_back(std::norm(amp));
  }
  return out;
}

std::vector<double> default_search_grid(std::size_t n, std::size_t points, double span_factor) {
  if (points < 2) throw std::invalid_argument("search grid needs at least two points");
  const double t_max = span_factor * grover_time(n);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

SearchResult run_noisy_search(const SearchProblem& problem, const SearchRunOptions& options) {
  const std::size_t n = problem.graph.node_count();
  if (n < 2) throw std::invalid_argument("search needs at least two nodes");
  auto grid = options.t_grid.empty() ? default_search_grid(n) : options.t_grid;
  if (grid.front() != 0.0) throw std::invalid_argument("search grid must start at t = 0");
  // Small slack for grids generated in floating point.
  if (grid.back() < 2.0 * grover_time(n) * (1.0 - 1e-12)) {
    throw std::invalid_argument("search grid must span at least [0, pi sqrt(N)]");
  }

  const auto spec = problem.hamiltonian_spec();
  EnsembleOptions eo;
  eo.trajectories = options.trajectories;
  eo.sample_times = grid;
  eo.origin = 0;
  eo.observed = problem.target;
  eo.threads = options.threads;
  eo.method = options.method;
  const auto ens = ensemble_average(spec, uniform_state(n), eo);

  SearchResult out;
  out.t_grid = grid;
  out.p_w = ens.target_probability;
  out.p_w_stderr = ens.target_probability_stderr;
  out.trajectories = options.trajectories;
  out.coupling = spec.coupling;
  // Revival peaks are equal up to rounding without noise; take the first.
  const double peak = *std::max_element(out.p_w.begin(), out.p_w.end());
  while (out.p_w[out.t_opt_index] < peak - kPeakTieTolerance) ++out.t_opt_index;
  out.t_opt = grid[out.t_opt_index];
  out.p_succ = out.p_w[out.t_opt_index];
  out.p_succ_stderr = out.p_w_stderr[out.t_opt_index];
  out.average_running_time = out.t_opt / out.p_succ;
  return out;
}

SearchResult optimize_coupling(SearchProblem problem, const SearchRunOptions& options, double lo,
                               double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw std::invalid_argument("coupling sweep needs 0 < lo <= hi and count >= 1");
  }
  SearchResult best;
  bool have = false;
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    problem.coupling = lo * std::pow(hi / lo, f);
    auto r = run_noisy_search(problem, options);
    // t_opt = 0 means the walk never beats the initial overlap; never prefer it.
    const bool better =
        !have || (r.t_opt > 0.0 && (best.t_opt == 0.0 ||
                                    r.average_running_time < best.average_running_time));
    if (better) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

LineFit scaling_exponent(std::span<const double> sizes, std::span<const double> times) {
  if (sizes.size() < 3) throw std::invalid_argument("scaling fit needs at least three points");
  return loglog_fit(sizes, times);
}

}  // namespace perqwalk
