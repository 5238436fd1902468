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

#include "perqwalk/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "perqwalk/observables.hpp"
#include "perqwalk/parallel.hpp"

namespace perqwalk {

void HamiltonianSpec::validate() const {
  noise.validate();
  if (!(coupling > 0.0) || !std::isfinite(coupling)) {
    throw std::invalid_argument("coupling must be finite and positive");
  }
  if (oracle && *oracle >= graph.node_count()) {
    throw std::invalid_argument("oracle node " + std::to_string(*oracle) + " outside graph of " +
                                std::to_string(graph.node_count()) + " nodes");
  }
  if (uses_domains() && !graph.chain_edge_order()) {
    throw std::invalid_argument("spatial noise domains need a line or ring graph");
  }
  if (noise.tunneling() && graph.edge_count() == 0 && !noise.silent()) {
    throw std::invalid_argument("tunneling noise on a graph without edges");
  }
}

SourceLayout SourceLayout::make(const HamiltonianSpec& spec, const DomainPartition* domains) {
  const auto& g = spec.graph;
  SourceLayout layout;
  if (spec.noise.tunneling() && g.edge_count() > 0) {
    layout.edge_source.resize(g.edge_count());
    if (domains != nullptr) {
      const auto order = g.chain_edge_order();
      if (!order) throw std::invalid_argument("noise domains need a line or ring graph");
      if (domains->edge_count() != g.edge_count()) {
        throw std::invalid_argument("domain partition covers " +
                                    std::to_string(domains->edge_count()) + " edges, graph has " +
                                    std::to_string(g.edge_count()));
      }
      for (std::size_t pos = 0; pos < order->size(); ++pos) {
        layout.edge_source[(*order)[pos]] = domains->domain_of(pos);
      }
      layout.count = domains->domain_count();
    } else {
      for (std::size_t e = 0; e < g.edge_count(); ++e) layout.edge_source[e] = e;
      layout.count = g.edge_count();
    }
  }
  if (spec.noise.on_site()) {
    layout.node_source.resize(g.node_count());
    for (std::size_t j = 0; j < g.node_count(); ++j) layout.node_source[j] = layout.count + j;
    layout.count += g.node_count();
  }
  return layout;
}

NoiseRealization sample_realization(const HamiltonianSpec& spec, std::uint64_t trajectory,
                                    double horizon) {
  NoiseRealization out;
  const auto& g = spec.graph;
  const DomainPartition* domains = nullptr;
  if (spec.uses_domains()) {
    Rng rng = stream_rng(spec.noise.seed, trajectory, kDomainStream);
    out.domains = sample_domains(g.edge_count(), spec.noise.correlation_p, rng);
    domains = &out.domains;
  } else if (spec.noise.tunneling() && g.edge_count() > 0) {
    out.domains = DomainPartition::independent(g.edge_count());
  }
  const auto layout = SourceLayout::make(spec, domains);
  out.sources.reserve(layout.count);
  for (std::size_t s = 0; s < layout.count; ++s) {
    Rng rng = stream_rng(spec.noise.seed, trajectory, kFirstSourceStream + s);
    out.sources.push_back(sample_trajectory(spec.noise.gamma, horizon, rng));
  }
  return out;
}

ParametricOperator build_operator(const HamiltonianSpec& spec, const SourceLayout& layout) {
  const auto& g = spec.graph;
  const double c = spec.coupling;
  const double nu = spec.noise.nu;
  ParametricOperator op(g.node_count(), layout.count);
  for (std::size_t j = 0; j < g.node_count(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    double diag = c * static_cast<double>(g.degree(j));
    if (spec.oracle && *spec.oracle == j) diag -= 1.0;
    op.add(i, i, diag);
    if (!layout.node_source.empty() && nu != 0.0) {
      op.add_term(i, i, layout.node_source[j], c * nu);
    }
  }
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto a = static_cast<Eigen::Index>(edges[e].a);
    const auto b = static_cast<Eigen::Index>(edges[e].b);
    op.add(a, b, -c);
    if (!layout.edge_source.empty() && nu != 0.0) {
      op.add_term(a, b, layout.edge_source[e], -c * nu);
    }
  }
  op.finalize();
  return op;
}

std::vector<double> resolve_source_values(const HamiltonianSpec& spec, const SourceLayout& layout,
                                          std::span<const double> source_values) {
  if (source_values.empty() && spec.noise.silent()) return std::vector<double>(layout.count, 0.0);
  if (source_values.size() != layout.count) {
    throw std::invalid_argument("expected " + std::to_string(layout.count) +
                                " noise source values, got " +
                                std::to_string(source_values.size()));
  }
  return {source_values.begin(), source_values.end()};
}

Eigen::MatrixXd assemble_hamiltonian(const HamiltonianSpec& spec,
                                     std::span<const double> source_values,
                                     const DomainPartition* domains) {
  spec.validate();
  const auto layout = SourceLayout::make(spec, domains);
  const auto values = resolve_source_values(spec, layout, source_values);
  return build_operator(spec, layout).dense(values);
}

namespace {

const DomainPartition* domains_of(const HamiltonianSpec& spec, const NoiseRealization& noise) {
  return spec.uses_domains() ? &noise.domains : nullptr;
}

// Silent noise cannot change H; dropping its events keeps the Hamiltonian
// constant so that one eigendecomposition serves the whole run.
SourceSchedule effective_schedule(const HamiltonianSpec& spec, std::size_t source_count,
                                  SourceSchedule schedule) {
  if (spec.noise.silent()) {
    schedule.events.clear();
    if (schedule.initial.empty()) schedule.initial.assign(source_count, 0.0);
  }
  return schedule;
}

}  // namespace

std::vector<StateVector> evolve_schedule(const HamiltonianSpec& spec,
                                         const DomainPartition* domains,
                                         const SourceSchedule& schedule, const StateVector& psi0,
                                         std::span<const double> sample_times,
                                         PropagationMethod method) {
  spec.validate();
  const auto layout = SourceLayout::make(spec, domains);
  const auto op = build_operator(spec, layout);
  Propagator prop(op, method);
  return prop.run(effective_schedule(spec, layout.count, schedule), psi0, sample_times);
}

std::vector<StateVector> evolve_trajectory(const HamiltonianSpec& spec,
                                           const NoiseRealization& noise, const StateVector& psi0,
                                           std::span<const double> sample_times,
                                           PropagationMethod method) {
  return evolve_schedule(spec, domains_of(spec, noise),
                         make_schedule(std::span<const RtnTrajectory>(noise.sources)), psi0,
                         sample_times, method);
}

StateVector localized_state(std::size_t n, NodeIndex j) {
  if (j >= n) throw std::invalid_argument("localized state node outside lattice");
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(n));
  psi[static_cast<Eigen::Index>(j)] = 1.0;
  return psi;
}

StateVector uniform_state(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform state needs n >= 1");
  return StateVector::Constant(static_cast<Eigen::Index>(n),
                               1.0 / std::sqrt(static_cast<double>(n)));
}

StateVector gaussian_packet(std::size_t n, double delta, double p0) {
  if (n < 3) throw std::invalid_argument("gaussian packet needs n >= 3");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("gaussian packet width delta must be positive");
  }
  const double center = 0.5 * static_cast<double>(n);
  StateVector psi(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) - center;
    psi[static_cast<Eigen::Index>(j)] =
        std::exp(-x * x / (2.0 * delta * delta)) * std::polar(1.0, -p0 * static_cast<double>(j));
  }
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("gaussian packet underflows on this lattice");
  psi /= norm;
  return psi;
}

namespace {

struct EnsembleAccumulator {
  std::vector<Eigen::VectorXd> distribution;
  // Per-trajectory first and second displacement moments.
  std::vector<double> m1, m2, m1_sq, m2_sq, m1_m2;
  std::vector<double> target, target_sq;
  std::vector<Eigen::MatrixXcd> rho;

  EnsembleAccumulator(std::size_t times, std::size_t n, bool observe, bool with_rho)
      : distribution(times, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
        m1(times, 0.0), m2(times, 0.0), m1_sq(times, 0.0), m2_sq(times, 0.0),
        m1_m2(times, 0.0) {
    if (observe) {
      target.assign(times, 0.0);
      target_sq.assign(times, 0.0);
    }
    if (with_rho) {
      rho.assign(times, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(n)));
    }
  }

  void merge(const EnsembleAccumulator& o) {
    for (std::size_t i = 0; i < distribution.size(); ++i) {
      distribution[i] += o.distribution[i];
      m1[i] += o.m1[i];
      m2[i] += o.m2[i];
      m1_sq[i] += o.m1_sq[i];
      m2_sq[i] += o.m2_sq[i];
      m1_m2[i] += o.m1_m2[i];
      if (!target.empty()) {
        target[i] += o.target[i];
        target_sq[i] += o.target_sq[i];
      }
      if (!rho.empty()) rho[i] += o.rho[i];
    }
  }
};

double sample_stderr(double sum, double sum_sq, double m) {
  if (m < 2.0) return 0.0;
  const double mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
  return std::sqrt(var / m);
}

}  // namespace

EnsembleResult ensemble_average(const HamiltonianSpec& spec, const StateVector& psi0,
                                const EnsembleOptions& options) {
  spec.validate();
  if (options.trajectories < 1) throw std::invalid_argument("need at least one trajectory");
  const auto& times = options.sample_times;
  if (times.empty()) throw std::invalid_argument("need at least one sample time");
  const std::size_t n = spec.graph.node_count();
  check_evolution_inputs(psi0, n, times, std::numeric_limits<double>::infinity());
  if (options.origin >= n) throw std::invalid_argument("origin node outside graph");
  const auto observed = options.observed ? options.observed : spec.oracle;
  if (observed && *observed >= n) throw std::invalid_argument("observed node outside graph");

  const double horizon = times.back() > 0.0 ? times.back() : 1.0;
  const bool periodic = spec.graph.is_cycle();
  const std::size_t nt = times.size();

  std::vector<double> displacement(n);
  for (std::size_t k = 0; k < n; ++k) {
    displacement[k] = signed_displacement(k, options.origin, n, periodic);
  }

  // Without domains every trajectory shares one operator structure.
  std::optional<ParametricOperator> shared_op;
  if (!spec.uses_domains()) {
    shared_op.emplace(build_operator(spec, SourceLayout::make(spec, nullptr)));
  }

  struct Worker {
    std::optional<Propagator> shared;
  };

  auto make_state = [&] {
    Worker w;
    if (shared_op) w.shared.emplace(*shared_op, options.method);
    return w;
  };
  auto make_acc = [&] {
    return EnsembleAccumulator(nt, n, observed.has_value(), options.accumulate_rho);
  };
  auto work = [&](Worker& w, EnsembleAccumulator& acc, std::size_t m) {
    const auto noise = sample_realization(spec, m, horizon);
    auto schedule =
        effective_schedule(spec, noise.sources.size(),
                           make_schedule(std::span<const RtnTrajectory>(noise.sources)));
    std::vector<StateVector> states;
    if (w.shared) {
      states = w.shared->run(schedule, psi0, times);
    } else {
      const auto op = build_operator(spec, SourceLayout::make(spec, &noise.domains));
      Propagator prop(op, options.method);
      states = prop.run(schedule, psi0, times);
    }
    for (std::size_t i = 0; i < nt; ++i) {
      const Eigen::VectorXd p = states[i].cwiseAbs2();
      acc.distribution[i] += p;
      double a = 0.0;
      double b = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double pk = p[static_cast<Eigen::Index>(k)];
        a += pk * displacement[k];
        b += pk * displacement[k] * displacement[k];
      }
      acc.m1[i] += a;
      acc.m2[i] += b;
      acc.m1_sq[i] += a * a;
      acc.m2_sq[i] += b * b;
      acc.m1_m2[i] += a * b;
      if (observed) {
        const double pw = p[static_cast<Eigen::Index>(*observed)];
        acc.target[i] += pw;
        acc.target_sq[i] += pw * pw;
      }
      if (options.accumulate_rho) acc.rho[i].noalias() += states[i] * states[i].adjoint();
    }
  };
  auto merge = [](EnsembleAccumulator& total, const EnsembleAccumulator& block) {
    total.merge(block);
  };

  auto total = ordered_reduce(options.trajectories, options.threads, make_state, make_acc, work,
                              merge);

  const auto m = static_cast<double>(options.trajectories);
  EnsembleResult out;
  out.sample_times = times;
  out.trajectories = options.trajectories;
  out.distribution.resize(nt);
  out.mean_displacement.resize(nt);
  out.variance.resize(nt);
  out.variance_stderr.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    out.distribution[i] = total.distribution[i] / m;
    const double e1 = total.m1[i] / m;
    const double e2 = total.m2[i] / m;
    out.mean_displacement[i] = e1;
    out.variance[i] = e2 - e1 * e1;
    if (m >= 2.0) {
      // Delta method for g(m1, m2) = m2 - m1^2.
      const double var1 = std::max(0.0, (total.m1_sq[i] - m * e1 * e1) / (m - 1.0));
      const double var2 = std::max(0.0, (total.m2_sq[i] - m * e2 * e2) / (m - 1.0));
      const double cov = (total.m1_m2[i] - m * e1 * e2) / (m - 1.0);
      const double g = var2 - 4.0 * e1 * cov + 4.0 * e1 * e1 * var1;
      out.variance_stderr[i] = std::sqrt(std::max(0.0, g) / m);
    }
  }
  if (observed) {
    out.target_probability.resize(nt);
    out.target_probability_stderr.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      out.target_probability[i] = total.target[i] / m;
      out.target_probability_stderr[i] = sample_stderr(total.target[i], total.target_sq[i], m);
    }
  }
  if (options.accumulate_rho) {
    out.rho.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) out.rho[i] = total.rho[i] / m;
  }
  return out;
}

}  // namespace perqwalk
