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

#include "perqwalk/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perqwalk {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng stream_rng(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t stream) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state = h ^ trajectory;
  h = splitmix64(state);
  state = h ^ stream;
  h = splitmix64(state);
  return Rng(h);
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

RtnTrajectory::RtnTrajectory(int initial_sign, std::vector<double> switch_times, double horizon)
    : initial_sign_(initial_sign), switch_times_(std::move(switch_times)), horizon_(horizon) {
  if (initial_sign != 1 && initial_sign != -1) {
    throw std::invalid_argument("RTN initial sign must be +1 or -1");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("RTN horizon must be positive");
  }
  double prev = 0.0;
  for (double t : switch_times_) {
    if (!(t > prev) || t > horizon_) {
      throw std::invalid_argument("RTN switch times must be strictly increasing in (0, horizon]");
    }
    prev = t;
  }
}

std::size_t RtnTrajectory::switches_until(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(switch_times_.begin(), switch_times_.end(), t) - switch_times_.begin());
}

int RtnTrajectory::value_at(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside RTN horizon [0, " +
                            std::to_string(horizon_) + "]");
  }
  return (switches_until(t) % 2 == 0) ? initial_sign_ : -initial_sign_;
}

RtnTrajectory sample_trajectory(double gamma, double horizon, Rng& rng) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("RTN rate gamma must be finite and non-negative");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("RTN horizon must be finite and positive");
  }
  const int sign = (rng() >> 63) ? 1 : -1;
  std::vector<double> times;
  if (gamma > 0.0) {
    double t = 0.0;
    for (;;) {
      // 1 - u lies in (0, 1], so the log is finite.
      t += -std::log1p(-uniform01(rng)) / gamma;
      if (t > horizon) break;
      // A zero gap from underflow would break strict monotonicity.
      if (!times.empty() && t <= times.back()) continue;
      if (t <= 0.0) continue;
      times.push_back(t);
    }
  }
  return RtnTrajectory(sign, std::move(times), horizon);
}

DomainPartition::DomainPartition(std::vector<std::size_t> assignment)
    : assignment_(std::move(assignment)) {
  if (assignment_.empty()) {
    throw std::invalid_argument("domain partition needs at least one edge");
  }
  if (assignment_.front() != 0) {
    throw std::invalid_argument("first edge must belong to domain 0");
  }
  for (std::size_t i = 1; i < assignment_.size(); ++i) {
    const auto step = assignment_[i] - assignment_[i - 1];
    if (assignment_[i] < assignment_[i - 1] || step > 1) {
      throw std::invalid_argument("domains must be contiguous blocks numbered in order");
    }
  }
  domains_ = assignment_.back() + 1;
}

DomainPartition DomainPartition::independent(std::size_t n_edges) {
  std::vector<std::size_t> a(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i) a[i] = i;
  return DomainPartition(std::move(a));
}

std::vector<std::size_t> DomainPartition::domain_lengths() const {
  std::vector<std::size_t> lengths(domains_, 0);
  for (auto d : assignment_) ++lengths[d];
  return lengths;
}

DomainPartition sample_domains(std::size_t n_edges, double p, Rng& rng) {
  if (n_edges < 1) {
    throw std::invalid_argument("sample_domains needs at least one edge");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("correlation probability p must lie in [0, 1]");
  }
  std::vector<std::size_t> assignment(n_edges, 0);
  for (std::size_t i = 1; i < n_edges; ++i) {
    const bool merged = uniform01(rng) < p;
    assignment[i] = assignment[i - 1] + (merged ? 0 : 1);
  }
  return DomainPartition(std::move(assignment));
}

double mean_domain_length(double p, std::size_t n) {
  if (n < 1) throw std::invalid_argument("mean_domain_length needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("correlation probability p must lie in [0, 1]");
  }
  double sum = 0.0;
  double term = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += term;
    term *= p;
  }
  return sum;
}

std::string_view to_string(NoiseTarget t) {
  switch (t) {
    case NoiseTarget::Tunneling: return "tunneling";
    case NoiseTarget::OnSite: return "onsite";
    case NoiseTarget::Both: return "both";
  }
  return "tunneling";
}

NoiseTarget parse_noise_target(std::string_view s) {
  if (s == "tunneling") return NoiseTarget::Tunneling;
  if (s == "onsite") return NoiseTarget::OnSite;
  if (s == "both") return NoiseTarget::Both;
  throw std::invalid_argument("unknown noise target '" + std::string(s) +
                              "' (expected tunneling, onsite or both)");
}

void NoiseSpec::validate() const {
  if (!(nu >= 0.0 && nu <= 1.0)) {
    throw std::invalid_argument("nu must lie in [0, 1] (units of the base coupling)");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be finite and positive");
  }
  if (!(correlation_p >= 0.0 && correlation_p <= 1.0)) {
    throw std::invalid_argument("correlation p must lie in [0, 1]");
  }
}

RtnStatistics estimate_rtn_statistics(double gamma, std::span<const double> times,
                                      std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("need at least two RTN samples");
  if (times.empty()) throw std::invalid_argument("need at least one lag time");
  RtnStatistics out;
  out.times.assign(times.begin(), times.end());
  out.horizon = *std::max_element(times.begin(), times.end());
  if (!(out.horizon > 0.0)) throw std::invalid_argument("lag times must include t > 0");
  out.samples = samples;

  const std::size_t nt = times.size();
  std::vector<double> sum(nt, 0.0);
  std::vector<double> sum_sq(nt, 0.0);
  double count_sum = 0.0;
  double count_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng = stream_rng(seed, i, kFirstSourceStream);
    const auto traj = sample_trajectory(gamma, out.horizon, rng);
    const double x0 = traj.value_at(0.0);
    for (std::size_t k = 0; k < nt; ++k) {
      const double c = x0 * traj.value_at(times[k]);
      sum[k] += c;
      sum_sq[k] += c * c;
    }
    const auto n = static_cast<double>(traj.switch_times().size());
    count_sum += n;
    count_sq += n * n;
  }
  const auto m = static_cast<double>(samples);
  out.autocorrelation.resize(nt);
  out.autocorrelation_stderr.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const double mean = sum[k] / m;
    const double var = std::max(0.0, (sum_sq[k] - m * mean * mean) / (m - 1.0));
    out.autocorrelation[k] = mean;
    out.autocorrelation_stderr[k] = std::sqrt(var / m);
  }
  out.switch_count_mean = count_sum / m;
  out.switch_count_variance =
      std::max(0.0, (count_sq - m * out.switch_count_mean * out.switch_count_mean) / (m - 1.0));
  return out;
}

}  // namespace perqwalk
