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

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "perqwalk/noise.hpp"
#include "perqwalk/operator.hpp"

namespace perqwalk {

enum class PropagationMethod {
  Auto,      // pick per run, see Propagator
  Spectral,  // Hermitian eigendecomposition per distinct Hamiltonian
  Series,    // Taylor series of exp(-iHt) on the (sparse) operator
};

std::string_view to_string(PropagationMethod m);
PropagationMethod parse_propagation_method(std::string_view s);

struct SourceSwitch {
  double time = 0.0;
  std::size_t source = 0;
  double value = 0.0;
};

/// Merged noise history of all sources, ready for event-driven propagation.
struct SourceSchedule {
  std::vector<double> initial;
  std::vector<SourceSwitch> events;  // sorted by (time, source)
  double horizon = 0.0;

  /// A schedule for noise that never changes: no events, infinite horizon.
  static SourceSchedule constant(std::vector<double> values);
};

template <PiecewiseConstantSource S>
SourceSchedule make_schedule(std::span<const S> sources) {
  SourceSchedule out;
  out.horizon = sources.empty() ? 0.0 : sources.front().horizon();
  out.initial.reserve(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& src = sources[s];
    out.horizon = std::min(out.horizon, static_cast<double>(src.horizon()));
    out.initial.push_back(static_cast<double>(src.value_at(0.0)));
    for (double t : src.switch_times()) {
      out.events.push_back(SourceSwitch{t, s, static_cast<double>(src.value_at(t))});
    }
  }
  if (sources.empty()) out.horizon = std::numeric_limits<double>::infinity();
  std::sort(out.events.begin(), out.events.end(), [](const SourceSwitch& a, const SourceSwitch& b) {
    return a.time != b.time ? a.time < b.time : a.source < b.source;
  });
  return out;
}

/// Exact propagation of a state under a piecewise-constant Hamiltonian.
///
/// Between two consecutive switch events the Hamiltonian is constant and
/// the state is advanced by exp(-i H dt), either through a cached
/// eigendecomposition or a Taylor series taken to machine precision.
/// States at the sample times are recorded by splitting the enclosing
/// interval, so there is no interpolation.
///
/// A Propagator is not thread safe; use one per worker. Its spectral cache
/// survives across run() calls, which never changes results.
class Propagator {
 public:
  Propagator(const ParametricOperator& op, PropagationMethod method = PropagationMethod::Auto);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) = delete;

  /// Throws std::invalid_argument for an unnormalized psi0 (deviation above
  /// 1e-8), unsorted or negative sample times, or sample times past the
  /// schedule horizon.
  std::vector<Eigen::VectorXcd> run(const SourceSchedule& schedule, const Eigen::VectorXcd& psi0,
                                    std::span<const double> sample_times);

  /// Method actually used by the last run().
  PropagationMethod last_method() const { return last_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  PropagationMethod requested_;
  PropagationMethod last_ = PropagationMethod::Auto;
};

/// Checks the preconditions shared by every evolution entry point.
void check_evolution_inputs(const Eigen::VectorXcd& psi0, std::size_t dim,
                            std::span<const double> sample_times, double horizon);

}  // namespace perqwalk
