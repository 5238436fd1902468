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

#include <cmath>
#include <stdexcept>
#include <complex>
#include <random>
#include <vector>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "perqwalk/graph.hpp"
#include "perqwalk/operator.hpp"
#include "perqwalk/propagate.hpp"

using namespace perqwalk;

namespace {

// Random symmetric operator with `sources` modulated entries.
ParametricOperator random_operator(std::size_t dim, std::size_t sources, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ParametricOperator op(dim, sources);
  for (std::size_t j = 0; j < dim; ++j) {
    op.add(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j), u(gen));
    const auto k = (j + 1) % dim;
    op.add(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k), u(gen));
  }
  for (std::size_t s = 0; s < sources; ++s) {
    const auto j = static_cast<Eigen::Index>(gen() % dim);
    const auto k = static_cast<Eigen::Index>(gen() % dim);
    op.add_term(j, k, s, u(gen));
  }
  op.finalize();
  return op;
}

Eigen::VectorXcd random_state(std::size_t dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = {g(gen), g(gen)};
  return v.normalized();
}

// exp(-i H dt) applied piecewise with Eigen's matrix exponential.
std::vector<Eigen::VectorXcd> reference(const ParametricOperator& op, const SourceSchedule& sch,
                                        Eigen::VectorXcd psi, const std::vector<double>& times) {
  std::vector<double> x = sch.initial;
  std::vector<Eigen::VectorXcd> out;
  double now = 0.0;
  std::size_t next = 0;
  const std::complex<double> mi(0.0, -1.0);
  auto advance = [&](double to) {
    if (to > now) {
      const Eigen::MatrixXcd h = op.dense(x).cast<std::complex<double>>();
      psi = (mi * (to - now) * h).exp() * psi;
      now = to;
    }
  };
  for (double t : times) {
    while (next < sch.events.size() && sch.events[next].time <= t) {
      advance(sch.events[next].time);
      x[sch.events[next].source] = sch.events[next].value;
      ++next;
    }
    advance(t);
    out.push_back(psi);
  }
  return out;
}

}  // namespace

TEST_SUITE("propagate") {

TEST_CASE("parametric operator assembly") {
  ParametricOperator op(3, 2);
  op.add(0, 1, -1.0);
  op.add(1, 0, -0.5);  // accumulates onto (0, 1)
  op.add(2, 2, 2.0);
  op.add_term(0, 1, 0, -1.0);
  op.add_term(2, 2, 1, 0.25);
  op.finalize();
  const std::vector<double> x = {1.0, -1.0};
  const auto h = op.dense(x);
  CHECK(h(0, 1) == -2.5);
  CHECK(h(1, 0) == -2.5);
  CHECK(h(2, 2) == 1.75);
  CHECK(op.entries_of(0).size() == 1);
  const auto [lo, hi] = op.spectral_bounds();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  CHECK(lo <= es.eigenvalues().minCoeff());
  CHECK(hi >= es.eigenvalues().maxCoeff());
}

TEST_CASE("operator instance matches the dense form") {
  for (std::size_t dim : {6u, 80u}) {
    const auto op = random_operator(dim, 5, 3);
    OperatorInstance inst(op);
    std::vector<double> x = {1, -1, 1, 1, -1};
    inst.set_all(x);
    const auto v = random_state(dim, 1);
    Eigen::VectorXcd y(v.size());
    inst.apply(v, y);
    CHECK((y - op.dense(x).cast<std::complex<double>>() * v).norm() < 1e-13);
    x[2] = -1;
    inst.update_source(x, 2);
    CHECK((inst.to_dense() - op.dense(x)).norm() < 1e-14);
    CHECK(inst.is_dense() == (dim == 6));
  }
}

TEST_CASE("methods agree with the matrix exponential") {
  const std::size_t dim = 12;
  const auto op = random_operator(dim, 3, 7);
  SourceSchedule sch;
  sch.initial = {1, -1, 1};
  sch.events = {{0.3, 0, -1}, {0.3, 2, -1}, {1.1, 1, 1}, {2.0, 0, 1}};
  sch.horizon = 3.0;
  const auto psi0 = random_state(dim, 5);
  const std::vector<double> times = {0.0, 0.3, 0.5, 1.7, 2.0, 3.0};
  const auto ref = reference(op, sch, psi0, times);
  for (auto m : {PropagationMethod::Spectral, PropagationMethod::Series, PropagationMethod::Auto}) {
    Propagator p(op, m);
    const auto got = p.run(sch, psi0, times);
    REQUIRE(got.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) CHECK((got[i] - ref[i]).norm() < 1e-11);
    if (m != PropagationMethod::Auto) CHECK(p.last_method() == m);
  }
}

TEST_CASE("series handles long steps and large norms") {
  const auto op = random_operator(40, 0, 2);
  ParametricOperator big(40, 0);
  for (const auto& e : op.entries()) big.add(e.row, e.col, 30.0 * e.base);
  big.finalize();
  const auto sch = SourceSchedule::constant({});
  const auto psi0 = random_state(40, 8);
  const std::vector<double> times = {0.0, 7.5};
  const auto ref = reference(big, sch, psi0, times);
  const auto got = Propagator(big, PropagationMethod::Series).run(sch, psi0, times);
  CHECK((got[1] - ref[1]).norm() < 1e-10);
  CHECK(std::abs(got[1].norm() - 1.0) < 1e-12);
}

TEST_CASE("t = 0 returns the initial state exactly") {
  const auto op = random_operator(5, 1, 1);
  const auto psi0 = random_state(5, 2);
  for (auto m : {PropagationMethod::Spectral, PropagationMethod::Series}) {
    const auto got =
        Propagator(op, m).run(SourceSchedule::constant({1.0}), psi0, std::vector<double>{0.0});
    CHECK(got[0] == psi0);
  }
}

TEST_CASE("input checks") {
  const auto op = random_operator(4, 1, 1);
  Propagator p(op);
  const auto psi0 = random_state(4, 1);
  const auto sch = SourceSchedule::constant({1.0});
  CHECK_THROWS_AS(p.run(sch, 2.0 * psi0, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(p.run(sch, psi0, std::vector<double>{1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(p.run(sch, psi0, std::vector<double>{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(p.run(sch, random_state(5, 1), std::vector<double>{1.0}),
                  std::invalid_argument);
  SourceSchedule finite = sch;
  finite.horizon = 1.0;
  CHECK_THROWS_AS(p.run(finite, psi0, std::vector<double>{2.0}), std::invalid_argument);
  CHECK(parse_propagation_method("series") == PropagationMethod::Series);
  CHECK_THROWS_AS(parse_propagation_method("rk4"), std::invalid_argument);
}

TEST_CASE("schedule from trajectories is time ordered") {
  std::vector<RtnTrajectory> src = {RtnTrajectory(1, {0.5, 2.0}, 3.0),
                                    RtnTrajectory(-1, {0.5, 1.0}, 3.0)};
  const auto sch = make_schedule(std::span<const RtnTrajectory>(src));
  CHECK(sch.initial == std::vector<double>{1.0, -1.0});
  REQUIRE(sch.events.size() == 4);
  CHECK(sch.events[0].time == 0.5);
  CHECK(sch.events[0].source == 0);
  CHECK(sch.events[0].value == -1.0);
  CHECK(sch.events[1].source == 1);
  CHECK(sch.events[1].value == 1.0);
  CHECK(sch.events[3].time == 2.0);
  CHECK(sch.horizon == 3.0);
}

}  // TEST_SUITE
