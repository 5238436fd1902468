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

#include "perqwalk/propagate.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace perqwalk {

namespace {

using cd = std::complex<double>;

// Taylor substeps keep ||H - shift|| * h below this.
constexpr double kMaxSeriesArgument = 2.0;
constexpr int kMaxSeriesTerms = 80;
// Stop once a term falls below this (squared) norm.
constexpr double kSeriesTolerance2 = 1e-34;

// Spectral memoization applies to small operators with few sources.
constexpr std::size_t kMemoSourceLimit = 20;
constexpr std::size_t kMemoDimLimit = 64;
constexpr std::size_t kConstantSpectralDimLimit = 512;
constexpr std::size_t kCacheByteBudget = std::size_t{64} << 20;

struct Eigensystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

}  // namespace

std::string_view to_string(PropagationMethod m) {
  switch (m) {
    case PropagationMethod::Auto: return "auto";
    case PropagationMethod::Spectral: return "spectral";
    case PropagationMethod::Series: return "series";
  }
  return "auto";
}

PropagationMethod parse_propagation_method(std::string_view s) {
  if (s == "auto") return PropagationMethod::Auto;
  if (s == "spectral") return PropagationMethod::Spectral;
  if (s == "series") return PropagationMethod::Series;
  throw std::invalid_argument("unknown propagation method '" + std::string(s) +
                              "' (expected auto, spectral or series)");
}

SourceSchedule SourceSchedule::constant(std::vector<double> values) {
  SourceSchedule s;
  s.initial = std::move(values);
  s.horizon = std::numeric_limits<double>::infinity();
  return s;
}

void check_evolution_inputs(const Eigen::VectorXcd& psi0, std::size_t dim,
                            std::span<const double> sample_times, double horizon) {
  if (static_cast<std::size_t>(psi0.size()) != dim) {
    throw std::invalid_argument("initial state has dimension " + std::to_string(psi0.size()) +
                                ", expected " + std::to_string(dim));
  }
  const double norm = psi0.norm();
  if (!(std::abs(norm - 1.0) <= 1e-8)) {
    throw std::invalid_argument("initial state is not normalized (norm " + std::to_string(norm) +
                                ")");
  }
  double prev = 0.0;
  for (double t : sample_times) {
    if (!(t >= prev)) {
      throw std::invalid_argument("sample times must be non-negative and non-decreasing");
    }
    if (t > horizon) {
      throw std::invalid_argument("sample time " + std::to_string(t) +
                                  " lies beyond the noise horizon " + std::to_string(horizon));
    }
    prev = t;
  }
}

struct Propagator::Impl {
  const ParametricOperator* op;
  OperatorInstance instance;
  double shift;
  double bound;
  std::vector<std::size_t> modulated;  // entries whose value depends on noise
  std::map<std::vector<double>, Eigensystem> cache;
  std::size_t cache_bytes = 0;
  Eigen::VectorXcd term;
  Eigen::VectorXcd scratch;
  Eigen::VectorXcd coeffs;

  explicit Impl(const ParametricOperator& o) : op(&o), instance(o) {
    auto [lo, hi] = o.spectral_bounds();
    shift = 0.5 * (lo + hi);
    bound = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < o.entries().size(); ++i) {
      if (o.entries()[i].term_count > 0) modulated.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(o.dim());
    term.resize(n);
    scratch.resize(n);
    coeffs.resize(n);
  }

  std::vector<double> key(std::span<const double> x) const {
    std::vector<double> k;
    k.reserve(modulated.size());
    for (std::size_t i : modulated) k.push_back(op->value(op->entries()[i], x));
    return k;
  }

  const Eigensystem& eigensystem(std::span<const double> x) {
    auto k = key(x);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    const std::size_t bytes = op->dim() * (op->dim() + 1) * sizeof(double);
    if (cache_bytes + bytes > kCacheByteBudget) {
      cache.clear();
      cache_bytes = 0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op->dense(x));
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("Hermitian eigendecomposition failed");
    }
    cache_bytes += bytes;
    auto [pos, inserted] =
        cache.emplace(std::move(k), Eigensystem{solver.eigenvalues(), solver.eigenvectors()});
    return pos->second;
  }

  void spectral_advance(const Eigensystem& es, double dt, Eigen::VectorXcd& psi) {
    coeffs.noalias() = es.vectors.transpose() * psi;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      coeffs[i] *= std::polar(1.0, -es.values[i] * dt);
    }
    psi.noalias() = es.vectors * coeffs;
  }

  void series_advance(double dt, Eigen::VectorXcd& psi) {
    const auto substeps =
        std::max<long>(1, static_cast<long>(std::ceil(bound * dt / kMaxSeriesArgument)));
    const double h = dt / static_cast<double>(substeps);
    const double arg = bound * h;
    for (long s = 0; s < substeps; ++s) {
      term = psi;
      for (int k = 1; k <= kMaxSeriesTerms; ++k) {
        instance.apply(term, scratch);
        scratch -= shift * term;
        term = scratch * cd(0.0, -h / k);
        psi += term;
        if (k >= arg && term.squaredNorm() <= kSeriesTolerance2) break;
      }
    }
    psi *= std::polar(1.0, -shift * dt);
  }
};

Propagator::Propagator(const ParametricOperator& op, PropagationMethod method)
    : impl_(std::make_unique<Impl>(op)), requested_(method) {}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;

std::vector<Eigen::VectorXcd> Propagator::run(const SourceSchedule& schedule,
                                              const Eigen::VectorXcd& psi0,
                                              std::span<const double> sample_times) {
  auto& im = *impl_;
  const auto& op = *im.op;
  if (schedule.initial.size() != op.source_count()) {
    throw std::invalid_argument("schedule has " + std::to_string(schedule.initial.size()) +
                                " sources, operator expects " +
                                std::to_string(op.source_count()));
  }
  check_evolution_inputs(psi0, op.dim(), sample_times, schedule.horizon);

  PropagationMethod method = requested_;
  if (method == PropagationMethod::Auto) {
    const bool memo_friendly = op.source_count() <= kMemoSourceLimit && op.dim() <= kMemoDimLimit;
    const bool constant = schedule.events.empty() && op.dim() <= kConstantSpectralDimLimit;
    method = (memo_friendly || constant) ? PropagationMethod::Spectral : PropagationMethod::Series;
  }
  last_ = method;

  std::vector<double> x = schedule.initial;
  if (method == PropagationMethod::Series) im.instance.set_all(x);

  std::vector<Eigen::VectorXcd> out;
  out.reserve(sample_times.size());
  Eigen::VectorXcd psi = psi0;
  double now = 0.0;
  const Eigensystem* es = nullptr;

  auto advance = [&](double until) {
    const double dt = until - now;
    if (dt > 0.0) {
      if (method == PropagationMethod::Spectral) {
        if (es == nullptr) es = &im.eigensystem(x);
        im.spectral_advance(*es, dt, psi);
      } else {
        im.series_advance(dt, psi);
      }
    }
    now = until;
  };

  std::size_t next = 0;
  const auto& events = schedule.events;
  for (double ts : sample_times) {
    while (next < events.size() && events[next].time <= ts) {
      advance(events[next].time);
      const double t_event = events[next].time;
      while (next < events.size() && events[next].time == t_event) {
        const auto& ev = events[next];
        if (ev.source >= x.size()) throw std::out_of_range("event source out of range");
        x[ev.source] = ev.value;
        if (method == PropagationMethod::Series) im.instance.update_source(x, ev.source);
        ++next;
      }
      es = nullptr;
    }
    advance(ts);
    out.push_back(psi);
  }
  return out;
}

}  // namespace perqwalk
