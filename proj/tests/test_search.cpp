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
#include <numbers>
#include <vector>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "perqwalk/search.hpp"

using namespace perqwalk;

namespace {

std::vector<double> grid(double t_max, int points) {
  std::vector<double> t;
  for (int i = 0; i < points; ++i) t.push_back(t_max * i / (points - 1));
  return t;
}

// p_w(t) by dense matrix exponential in the full space.
std::vector<double> full_space_curve(const Eigen::MatrixXd& h, std::size_t target,
                                     const std::vector<double>& times) {
  const auto n = h.rows();
  const Eigen::VectorXcd s = Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
  std::vector<double> out;
  for (double t : times) {
    const Eigen::MatrixXcd u = (std::complex<double>(0.0, -t) * h.cast<std::complex<double>>()).exp();
    out.push_back(std::norm((u * s)[static_cast<Eigen::Index>(target)]));
  }
  return out;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("two-node search hamiltonian by hand") {
  const auto h = search_hamiltonian(complete_graph(2), 0.5, 1);
  CHECK(h(0, 0) == 0.5);
  CHECK(h(0, 1) == -0.5);
  CHECK(h(1, 0) == -0.5);
  CHECK(h(1, 1) == -0.5);
}

TEST_CASE("zero coupling leaves only the oracle") {
  const auto h = search_hamiltonian(star_graph(5), 0.0, 3);
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(5, 5);
  want(3, 3) = -1.0;
  CHECK(h == want);
  const auto hs = search_hamiltonian(complete_graph(7), 0.3, 2);
  CHECK(hs == hs.transpose());
  CHECK_THROWS_AS(search_hamiltonian(complete_graph(3), 0.3, 3), std::invalid_argument);
}

TEST_CASE("closed-form grover probability") {
  for (std::size_t n : {4u, 16u, 100u}) {
    CHECK(grover_probability(n, 0.0) == doctest::Approx(1.0 / n).epsilon(1e-15));
    CHECK(grover_probability(n, grover_time(n)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(grover_probability(4, std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("reduced complete hamiltonian") {
  const auto h = reduced_complete_hamiltonian(4);
  const double r3 = std::sqrt(3.0);
  CHECK(h(0, 0) == doctest::Approx(0.25));
  CHECK(h(0, 1) == doctest::Approx(-r3 / 4));
  CHECK(h(1, 0) == doctest::Approx(-r3 / 4));
  CHECK(h(1, 1) == doctest::Approx(-0.25));
  for (std::size_t n : {4u, 9u, 50u}) {
    const double nn = static_cast<double>(n);
    const Eigen::Vector2d s(std::sqrt((nn - 1) / nn), std::sqrt(1 / nn));
    const Eigen::Vector2d hs = reduced_complete_hamiltonian(n) * s;
    CHECK(std::abs(hs[0]) < 1e-15);
    CHECK(hs[1] == doctest::Approx(-1.0 / std::sqrt(nn)).epsilon(1e-14));
  }
}

TEST_CASE("full and reduced complete-graph curves agree") {
  const std::size_t n = 8;
  const auto times = grid(2.0 * grover_time(n), 60);
  const auto full = full_space_curve(search_hamiltonian(complete_graph(n), 1.0 / n, 3), 3, times);
  const double nn = n;
  const Eigen::Vector2d s(std::sqrt((nn - 1) / nn), std::sqrt(1 / nn));
  const auto red = reduced_target_probability(reduced_complete_hamiltonian(n), s, 1, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(std::abs(full[i] - red[i]) < 1e-10);
    CHECK(std::abs(red[i] - grover_probability(n, times[i])) < 1e-12);
  }
}

TEST_CASE("reduced star hamiltonian") {
  const auto h = reduced_star_hamiltonian(4);
  Eigen::Matrix3d want;
  want << 3, -1, -std::sqrt(2.0), -1, 0, 0, -std::sqrt(2.0), 0, 1;
  CHECK((h - want).norm() < 1e-15);
  for (std::size_t n : {3u, 10u, 64u}) {
    const auto m = reduced_star_hamiltonian(n);
    CHECK(m == m.transpose());
  }
}

TEST_CASE("star external target: full space, reduced model and the 1 - 1/N^2 law") {
  for (std::size_t n : {16u, 32u, 64u}) {
    const auto times = default_search_grid(n, 600, 2.0);
    const auto full = full_space_curve(search_hamiltonian(star_graph(n), 1.0, 1), 1, times);
    const double nn = n;
    // |c>, |w>, |r> with |r> uniform over the other N - 2 leaves.
    const Eigen::Vector3d s(1 / std::sqrt(nn), 1 / std::sqrt(nn), std::sqrt((nn - 2) / nn));
    const auto red = reduced_target_probability(reduced_star_hamiltonian(n), s, 1, times);
    double peak = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(full[i] - red[i]) < 1e-9);
      peak = std::max(peak, full[i]);
    }
    CHECK(std::abs(peak - (1.0 - 1.0 / (nn * nn))) < 0.05);
  }
}

TEST_CASE("noiseless complete-graph search finds the target") {
  for (std::size_t n : {4u, 16u, 64u}) {
    SearchProblem pr;
    pr.graph = complete_graph(n);
    pr.target = n / 2;
    SearchRunOptions so;
    so.t_grid = default_search_grid(n, 401, 2.0);
    const auto r = run_noisy_search(pr, so);
    CHECK(r.p_succ >= 0.9999);
    CHECK(std::abs(r.t_opt - grover_time(n)) <= so.t_grid[1]);
    CHECK(r.average_running_time == doctest::Approx(r.t_opt / r.p_succ));
    CHECK(r.coupling == 1.0 / n);
  }
}

TEST_CASE("central star target behaves like the complete graph") {
  for (std::size_t n : {8u, 32u}) {
    SearchRunOptions so;
    so.t_grid = default_search_grid(n, 200, 2.0);
    SearchProblem star;
    star.graph = star_graph(n);
    star.target = 0;
    SearchProblem comp;
    comp.graph = complete_graph(n);
    comp.target = 0;
    const auto a = run_noisy_search(star, so);
    const auto b = run_noisy_search(comp, so);
    for (std::size_t i = 0; i < a.p_w.size(); ++i) CHECK(std::abs(a.p_w[i] - b.p_w[i]) < 1e-10);
  }
}

TEST_CASE("grid validation") {
  SearchProblem pr;
  pr.graph = complete_graph(9);
  SearchRunOptions so;
  so.t_grid = grid(5.0, 10);  // short of pi sqrt(N)
  CHECK_THROWS_AS(run_noisy_search(pr, so), std::invalid_argument);
  so.t_grid = {0.5, 20.0};
  CHECK_THROWS_AS(run_noisy_search(pr, so), std::invalid_argument);
}

TEST_CASE("noise lowers the success probability") {
  SearchProblem pr;
  pr.graph = complete_graph(16);
  pr.noise = NoiseSpec{1.0, 0.01, 0.0, NoiseTarget::Tunneling, 3};
  SearchRunOptions so;
  so.trajectories = 30;
  const auto r = run_noisy_search(pr, so);
  CHECK(r.p_succ < 0.999);
  CHECK(r.p_succ > 1.0 / 16);
  CHECK(r.p_succ_stderr > 0.0);
}

TEST_CASE("coupling sweep keeps the fastest coupling") {
  SearchProblem pr;
  pr.graph = star_graph(16);
  pr.target = 1;
  SearchRunOptions so;
  so.t_grid = default_search_grid(16, 300, 2.0);
  const auto best = optimize_coupling(pr, so, 1.0 / 16, 1.0, 5);
  pr.coupling = 1.0 / 16;
  const auto small = run_noisy_search(pr, so);
  CHECK(best.average_running_time <= small.average_running_time);
  CHECK(best.p_succ > 0.9);
}

TEST_CASE("scaling exponent") {
  const std::vector<double> n = {8, 16, 32, 64};
  std::vector<double> t;
  for (double x : n) t.push_back(std::sqrt(x));
  CHECK(scaling_exponent(n, t).slope == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(scaling_exponent(n, n).slope == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> tavg;
  for (double x : n) tavg.push_back(grover_time(static_cast<std::size_t>(x)));
  CHECK(std::abs(scaling_exponent(n, tavg).slope - 0.5) < 0.02);
  CHECK_THROWS_AS(scaling_exponent(std::vector<double>{8, 16}, std::vector<double>{1, 2}),
                  std::invalid_argument);
}

}  // TEST_SUITE
