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

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace perqwalk {

using Rng = std::mt19937_64;

/// Stream identifiers below kFirstSourceStream are reserved; source s of a
/// trajectory draws from stream kFirstSourceStream + s.
inline constexpr std::uint64_t kDomainStream = 0;
inline constexpr std::uint64_t kFirstSourceStream = 1;

/// Engine for one (seed, trajectory, stream) triple. The three words are
/// mixed with splitmix64 so that neighboring indices give unrelated states
/// and the result never depends on which worker evaluates the trajectory.
Rng stream_rng(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t stream);

/// Uniform double in [0, 1) with 53 random bits. Portable across standard
/// libraries, unlike std::uniform_real_distribution.
double uniform01(Rng& rng);

/// Anything piecewise constant in time that the propagator can consume.
template <class S>
concept PiecewiseConstantSource = requires(const S& s, double t) {
  { s.switch_times() } -> std::convertible_to<std::span<const double>>;
  { s.value_at(t) } -> std::convertible_to<double>;
  { s.horizon() } -> std::convertible_to<double>;
};

/// One realization of dichotomic (+1/-1) random telegraph noise on [0, horizon].
class RtnTrajectory {
 public:
  RtnTrajectory() = default;
  /// Throws std::invalid_argument unless the switch times are strictly
  /// increasing inside (0, horizon] and initial_sign is +1 or -1.
  RtnTrajectory(int initial_sign, std::vector<double> switch_times, double horizon);

  int initial_sign() const { return initial_sign_; }
  std::span<const double> switch_times() const { return switch_times_; }
  double horizon() const { return horizon_; }

  /// Number of switches at times <= t.
  std::size_t switches_until(double t) const;
  /// initial_sign * (-1)^switches_until(t). Throws outside [0, horizon].
  int value_at(double t) const;

 private:
  int initial_sign_ = 1;
  std::vector<double> switch_times_;
  double horizon_ = 0.0;
};

static_assert(PiecewiseConstantSource<RtnTrajectory>);

/// Stationary RTN: Poisson switch times of rate gamma on (0, horizon] drawn
/// from exponential gaps, initial sign +1/-1 with equal probability.
RtnTrajectory sample_trajectory(double gamma, double horizon, Rng& rng);

/// Assignment of an ordered edge sequence to contiguous, synchronized domains.
class DomainPartition {
 public:
  DomainPartition() = default;
  /// assignment[i] is the domain of edge i; must start at 0 and be
  /// non-decreasing in steps of 0 or 1.
  explicit DomainPartition(std::vector<std::size_t> assignment);

  /// Every edge in its own domain.
  static DomainPartition independent(std::size_t n_edges);

  std::size_t edge_count() const { return assignment_.size(); }
  std::size_t domain_count() const { return domains_; }
  std::size_t domain_of(std::size_t edge) const { return assignment_.at(edge); }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  /// Length of every domain in order.
  std::vector<std::size_t> domain_lengths() const;

 private:
  std::vector<std::size_t> assignment_;
  std::size_t domains_ = 0;
};

/// Each of the n_edges-1 boundaries between neighboring edges is merged
/// independently with probability p.
DomainPartition sample_domains(std::size_t n_edges, double p, Rng& rng);

/// Average domain length sum_{k<n} p^k; equals n at p = 1.
double mean_domain_length(double p, std::size_t n);

enum class NoiseTarget { Tunneling, OnSite, Both };

std::string_view to_string(NoiseTarget t);
NoiseTarget parse_noise_target(std::string_view s);

struct NoiseSpec {
  double nu = 0.0;             // strength, in units of the base coupling
  double gamma = 1.0;          // switching rate
  double correlation_p = 0.0;  // neighbor-edge correlation probability
  NoiseTarget target = NoiseTarget::Tunneling;
  std::uint64_t seed = 0;

  bool tunneling() const { return target != NoiseTarget::OnSite; }
  bool on_site() const { return target != NoiseTarget::Tunneling; }
  /// Noise that can never change the Hamiltonian.
  bool silent() const { return nu == 0.0; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Monte Carlo estimate of <X(t)X(0)> and of the switch-count distribution.
struct RtnStatistics {
  std::vector<double> times;
  std::vector<double> autocorrelation;
  std::vector<double> autocorrelation_stderr;
  double horizon = 0.0;
  std::size_t samples = 0;
  double switch_count_mean = 0.0;
  double switch_count_variance = 0.0;
};

/// Trajectory i uses stream_rng(seed, i, kFirstSourceStream).
RtnStatistics estimate_rtn_statistics(double gamma, std::span<const double> times,
                                      std::size_t samples, std::uint64_t seed);

}  // namespace perqwalk
