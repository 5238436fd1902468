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
#include <vector>

#include <doctest.h>

#include "perqwalk/dynamics.hpp"
#include "perqwalk/observables.hpp"

using namespace perqwalk;

TEST_SUITE("observables") {

TEST_CASE("distribution of basis and uniform states") {
  const auto d = position_distribution(localized_state(5, 0));
  CHECK(d.probabilities[0] == 1.0);
  CHECK(d.probabilities.tail(4).isZero(0.0));
  const auto u = position_distribution(uniform_state(8));
  for (int k = 0; k < 8; ++k) CHECK(std::abs(u.probabilities[k] - 0.125) < 1e-15);
  CHECK_THROWS_AS(position_distribution(2.0 * uniform_state(8)), std::invalid_argument);
}

TEST_CASE("variance of simple distributions") {
  PositionDistribution delta{Eigen::VectorXd::Unit(7, 3), 0.0};
  CHECK(variance(delta, 3, false) == 0.0);
  PositionDistribution pm{Eigen::VectorXd::Zero(7), 0.0};
  pm.probabilities[2] = pm.probabilities[4] = 0.5;
  CHECK(variance(pm, 3, false) == 1.0);
  // Wrapped displacements on a ring.
  PositionDistribution wrap{Eigen::VectorXd::Zero(10), 0.0};
  wrap.probabilities[1] = wrap.probabilities[9] = 0.5;
  CHECK(variance(wrap, 0, true) == 1.0);
  CHECK(signed_displacement(9, 0, 10, true) == -1.0);
  CHECK(signed_displacement(5, 0, 10, true) == 5.0);
  CHECK(signed_displacement(9, 0, 10, false) == 9.0);
}

TEST_CASE("bessel sequence against the standard library") {
  for (double x : {0.0, 0.1, 1.0, 7.3, 40.0, 100.0}) {
    const auto j = bessel_j_sequence(150, x);
    for (std::size_t k = 0; k <= 150; k += 7) {
      CHECK(std::abs(j[k] - std::cyl_bessel_j(static_cast<double>(k), x)) < 1e-13);
    }
  }
}

TEST_CASE("bessel distribution") {
  const auto d0 = bessel_distribution(101, 50, 0.0);
  CHECK(d0.probabilities[50] == 1.0);
  CHECK(d0.probabilities.sum() == 1.0);
  for (double t : {0.5, 3.0, 10.0, 20.0}) {
    const auto d = bessel_distribution(201, 100, t);
    CHECK(std::abs(d.probabilities.sum() - 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(bessel_distribution(21, 10, 20.0), std::invalid_argument);
}

TEST_CASE("noiseless line matches the bessel distribution") {
  HamiltonianSpec spec;
  spec.graph = line_graph(101, false);
  const auto s = evolve_schedule(spec, nullptr, SourceSchedule::constant({}),
                                 localized_state(101, 50), std::vector<double>{5.0});
  const auto d = position_distribution(s[0], 5.0);
  const auto b = bessel_distribution(101, 50, 5.0, 1.0, false);
  CHECK((d.probabilities - b.probabilities).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noiseless variance is 2 t^2") {
  for (double t : {1.0, 5.0, 15.0}) {
    // Brute-force moment of the infinite line, |k| <= 200.
    double m2 = 0.0;
    for (int k = -200; k <= 200; ++k) {
      const double j = std::cyl_bessel_j(static_cast<double>(std::abs(k)), 2.0 * t);
      m2 += k * k * j * j;
    }
    CHECK(std::abs(m2 - 2.0 * t * t) < 1e-6);
    CHECK(std::abs(variance(bessel_distribution(401, 200, t), 200, true) - m2) < 1e-6);
  }
}

TEST_CASE("late-time distribution peaks at the edges") {
  const auto d = bessel_distribution(401, 200, 50.0);
  const auto& p = d.probabilities;
  for (int k = 1; k <= 200; ++k) CHECK(std::abs(p[200 + k] - p[200 - k]) < 1e-15);
  Eigen::Index arg = 0;
  p.maxCoeff(&arg);
  CHECK(std::abs(arg - 200) > 90);  // front near |k| = 2t = 100
  CHECK(p[200 + 98] > 5.0 * p[200 + 10]);
}

TEST_CASE("regime classification") {
  std::vector<double> t;
  std::vector<double> sq;
  std::vector<double> lin;
  std::vector<double> flat;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(0.5 * i);
    sq.push_back(t.back() * t.back());
    lin.push_back(t.back());
    flat.push_back(3.0);
  }
  auto r = classify_regime(t, sq);
  CHECK(r.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.regime == Regime::Ballistic);
  r = classify_regime(t, lin);
  CHECK(r.exponent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.regime == Regime::Diffusive);
  r = classify_regime(t, flat);
  CHECK(std::abs(r.exponent) < 1e-12);
  CHECK(r.regime == Regime::Localized);
  CHECK(to_string(Regime::Crossover) == "crossover");
  CHECK_THROWS_AS(classify_regime(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                  std::invalid_argument);
}

TEST_CASE("log-log fit") {
  const std::vector<double> n = {8, 16, 32, 64};
  std::vector<double> root;
  for (double x : n) root.push_back(std::sqrt(x));
  const auto f = loglog_fit(n, root);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(f.slope_stderr < 1e-12);
  CHECK(loglog_fit(n, n).slope == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(loglog_fit(std::vector<double>{1, 2}, std::vector<double>{0, 1}),
                  std::invalid_argument);
}

}  // TEST_SUITE
