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

#include "perqwalk/multiparticle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "perqwalk/parallel.hpp"

namespace perqwalk {

std::string_view to_string(Statistics s) {
  switch (s) {
    case Statistics::Distinguishable: return "distinguishable";
    case Statistics::Bosonic: return "bosonic";
    case Statistics::Fermionic: return "fermionic";
  }
  return "distinguishable";
}

Statistics parse_statistics(std::string_view s) {
  if (s == "distinguishable") return Statistics::Distinguishable;
  if (s == "bosonic") return Statistics::Bosonic;
  if (s == "fermionic") return Statistics::Fermionic;
  throw std::invalid_argument("unknown particle statistics '" + std::string(s) +
                              "' (expected distinguishable, bosonic or fermionic)");
}

TwoParticleState TwoParticleState::product(const StateVector& first, const StateVector& second,
                                           Statistics statistics) {
  if (first.size() != second.size()) {
    throw std::invalid_argument("product state factors differ in dimension");
  }
  const auto n = static_cast<std::size_t>(first.size());
  TwoParticleState s;
  s.n = n;
  s.statistics = statistics;
  s.amplitudes.resize(static_cast<Eigen::Index>(n * n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      s.amplitudes[static_cast<Eigen::Index>(j * n + k)] =
          first[static_cast<Eigen::Index>(j)] * second[static_cast<Eigen::Index>(k)];
    }
  }
  return s;
}

double InteractionSpec::at(std::size_t distance) const {
  auto it = values.find(distance);
  return it == values.end() ? 0.0 : it->second;
}

std::size_t pair_distance(std::size_t j, std::size_t k, std::size_t n, bool periodic) {
  const std::size_t d = j > k ? j - k : k - j;
  return periodic ? std::min(d, n - d) : d;
}

ParametricOperator build_two_particle_operator(const HamiltonianSpec& spec,
                                               const SourceLayout& layout,
                                               const InteractionSpec& interaction) {
  const auto single = build_operator(spec, layout);
  const std::size_t n = single.dim();
  const auto nn = static_cast<Eigen::Index>(n);
  ParametricOperator op(n * n, single.source_count());
  const auto& terms = single.terms();
  for (const auto& e : single.entries()) {
    for (Eigen::Index l = 0; l < nn; ++l) {
      // H (x) I acts on the first index, I (x) H on the second.
      const Eigen::Index rows[2] = {e.row * nn + l, l * nn + e.row};
      const Eigen::Index cols[2] = {e.col * nn + l, l * nn + e.col};
      for (int f = 0; f < 2; ++f) {
        op.add(rows[f], cols[f], e.base);
        for (std::size_t t = 0; t < e.term_count; ++t) {
          const auto& term = terms[e.first_term + t];
          op.add_term(rows[f], cols[f], term.source, term.coefficient);
        }
      }
    }
  }
  const bool periodic = spec.graph.is_cycle();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double u = interaction.at(pair_distance(j, k, n, periodic));
      const auto i = static_cast<Eigen::Index>(j * n + k);
      // Always touch the diagonal so the structure is independent of u.
      op.add(i, i, u);
    }
  }
  op.finalize();
  return op;
}

Eigen::MatrixXd two_particle_hamiltonian(const HamiltonianSpec& spec,
                                         std::span<const double> source_values,
                                         const InteractionSpec& interaction,
                                         const DomainPartition* domains) {
  spec.validate();
  const auto layout = SourceLayout::make(spec, domains);
  const auto values = resolve_source_values(spec, layout, source_values);
  return build_two_particle_operator(spec, layout, interaction).dense(values);
}

namespace {

Eigen::VectorXcd swapped(const TwoParticleState& s) {
  Eigen::VectorXcd out(s.amplitudes.size());
  for (std::size_t j = 0; j < s.n; ++j) {
    for (std::size_t k = 0; k < s.n; ++k) {
      out[static_cast<Eigen::Index>(j * s.n + k)] = s.amplitude(k, j);
    }
  }
  return out;
}

void check_shape(const TwoParticleState& s) {
  if (s.n == 0 || static_cast<std::size_t>(s.amplitudes.size()) != s.n * s.n) {
    throw std::invalid_argument("two-particle state must have n*n amplitudes");
  }
}

}  // namespace

TwoParticleState symmetrize(const TwoParticleState& state) {
  check_shape(state);
  if (state.statistics == Statistics::Distinguishable) return state;
  TwoParticleState out = state;
  const auto p = swapped(state);
  out.amplitudes = state.statistics == Statistics::Bosonic ? Eigen::VectorXcd(state.amplitudes + p)
                                                           : Eigen::VectorXcd(state.amplitudes - p);
  const double norm = out.amplitudes.norm();
  if (!(norm > 1e-12)) {
    throw std::invalid_argument(std::string("state has no ") +
                                (state.statistics == Statistics::Bosonic ? "symmetric"
                                                                         : "antisymmetric") +
                                " component");
  }
  out.amplitudes /= norm;
  return out;
}

double exchange_leakage(const TwoParticleState& state) {
  check_shape(state);
  if (state.statistics == Statistics::Distinguishable) return 0.0;
  const auto p = swapped(state);
  const Eigen::VectorXcd wrong = state.statistics == Statistics::Bosonic
                                     ? Eigen::VectorXcd(state.amplitudes - p)
                                     : Eigen::VectorXcd(state.amplitudes + p);
  return 0.5 * wrong.norm();
}

namespace {

const DomainPartition* realization_domains(const HamiltonianSpec& spec,
                                           const NoiseRealization& noise) {
  return spec.uses_domains() ? &noise.domains : nullptr;
}

SourceSchedule schedule_for(const HamiltonianSpec& spec, const NoiseRealization& noise) {
  auto schedule = make_schedule(std::span<const RtnTrajectory>(noise.sources));
  if (spec.noise.silent()) schedule.events.clear();
  return schedule;
}

}  // namespace

std::vector<TwoParticleState> evolve_two_particle(const HamiltonianSpec& spec,
                                                  const NoiseRealization& noise,
                                                  const InteractionSpec& interaction,
                                                  const TwoParticleState& psi0,
                                                  std::span<const double> sample_times,
                                                  PropagationMethod method) {
  spec.validate();
  check_shape(psi0);
  if (psi0.n != spec.graph.node_count()) {
    throw std::invalid_argument("two-particle state does not match the graph size");
  }
  if (exchange_leakage(psi0) > 1e-8) {
    throw std::invalid_argument("initial state violates its exchange symmetry");
  }
  const auto layout = SourceLayout::make(spec, realization_domains(spec, noise));
  const auto op = build_two_particle_operator(spec, layout, interaction);
  Propagator prop(op, method);
  const auto states = prop.run(schedule_for(spec, noise), psi0.amplitudes, sample_times);
  std::vector<TwoParticleState> out;
  out.reserve(states.size());
  for (const auto& a : states) out.push_back(TwoParticleState{psi0.n, a, psi0.statistics});
  return out;
}

Eigen::VectorXd marginal(const TwoParticleState& state, int particle) {
  check_shape(state);
  if (particle != 0 && particle != 1) throw std::invalid_argument("particle must be 0 or 1");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state.n));
  for (std::size_t j = 0; j < state.n; ++j) {
    for (std::size_t k = 0; k < state.n; ++k) {
      const double v = std::norm(state.amplitude(j, k));
      p[static_cast<Eigen::Index>(particle == 0 ? j : k)] += v;
    }
  }
  return p;
}

double diagonal_mass(const TwoParticleState& state) {
  check_shape(state);
  double m = 0.0;
  for (std::size_t j = 0; j < state.n; ++j) m += std::norm(state.amplitude(j, j));
  return m;
}

TwoParticleEnsembleResult ensemble_two_particle(const HamiltonianSpec& spec,
                                                const InteractionSpec& interaction,
                                                const TwoParticleState& psi0,
                                                const EnsembleOptions& options) {
  spec.validate();
  check_shape(psi0);
  if (options.trajectories < 1) throw std::invalid_argument("need at least one trajectory");
  const auto& times = options.sample_times;
  if (times.empty()) throw std::invalid_argument("need at least one sample time");
  const std::size_t n = psi0.n;
  const std::size_t nt = times.size();
  const double horizon = times.back() > 0.0 ? times.back() : 1.0;
  const bool periodic = spec.graph.is_cycle();

  struct Acc {
    std::vector<Eigen::VectorXd> first, second;
    std::vector<double> diag, diag_sq, distance;
    Eigen::MatrixXd joint;
  };
  auto make_acc = [&] {
    const auto ni = static_cast<Eigen::Index>(n);
    return Acc{std::vector<Eigen::VectorXd>(nt, Eigen::VectorXd::Zero(ni)),
               std::vector<Eigen::VectorXd>(nt, Eigen::VectorXd::Zero(ni)),
               std::vector<double>(nt, 0.0), std::vector<double>(nt, 0.0),
               std::vector<double>(nt, 0.0), Eigen::MatrixXd::Zero(ni, ni)};
  };

  std::optional<ParametricOperator> shared_op;
  if (!spec.uses_domains()) {
    shared_op.emplace(build_two_particle_operator(spec, SourceLayout::make(spec, nullptr),
                                                  interaction));
  }
  struct Worker {
    std::optional<Propagator> shared;
  };
  auto make_state = [&] {
    Worker w;
    if (shared_op) w.shared.emplace(*shared_op, options.method);
    return w;
  };
  auto work = [&](Worker& w, Acc& acc, std::size_t m) {
    const auto noise = sample_realization(spec, m, horizon);
    const auto schedule = schedule_for(spec, noise);
    std::vector<Eigen::VectorXcd> states;
    if (w.shared) {
      states = w.shared->run(schedule, psi0.amplitudes, times);
    } else {
      const auto op = build_two_particle_operator(
          spec, SourceLayout::make(spec, &noise.domains), interaction);
      Propagator prop(op, options.method);
      states = prop.run(schedule, psi0.amplitudes, times);
    }
    for (std::size_t i = 0; i < nt; ++i) {
      const TwoParticleState s{n, states[i], psi0.statistics};
      acc.first[i] += marginal(s, 0);
      acc.second[i] += marginal(s, 1);
      const double d = diagonal_mass(s);
      acc.diag[i] += d;
      acc.diag_sq[i] += d * d;
      double mean_d = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          mean_d += std::norm(s.amplitude(j, k)) * static_cast<double>(pair_distance(j, k, n, periodic));
        }
      }
      acc.distance[i] += mean_d;
    }
    const auto& last = states.back();
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        acc.joint(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
            std::norm(last[static_cast<Eigen::Index>(j * n + k)]);
      }
    }
  };
  auto merge = [](Acc& total, const Acc& b) {
    for (std::size_t i = 0; i < total.first.size(); ++i) {
      total.first[i] += b.first[i];
      total.second[i] += b.second[i];
      total.diag[i] += b.diag[i];
      total.diag_sq[i] += b.diag_sq[i];
      total.distance[i] += b.distance[i];
    }
    total.joint += b.joint;
  };

  auto total = ordered_reduce(options.trajectories, options.threads, make_state, make_acc, work,
                              merge);
  const auto m = static_cast<double>(options.trajectories);
  TwoParticleEnsembleResult out;
  out.sample_times = times;
  out.trajectories = options.trajectories;
  out.joint_final = total.joint / m;
  for (std::size_t i = 0; i < nt; ++i) {
    out.marginal_first.push_back(total.first[i] / m);
    out.marginal_second.push_back(total.second[i] / m);
    const double mean = total.diag[i] / m;
    out.diagonal_mass.push_back(mean);
    double se = 0.0;
    if (m >= 2.0) {
      const double var = std::max(0.0, (total.diag_sq[i] - m * mean * mean) / (m - 1.0));
      se = std::sqrt(var / m);
    }
    out.diagonal_mass_stderr.push_back(se);
    out.mean_distance.push_back(total.distance[i] / m);
  }
  return out;
}

}  // namespace perqwalk
