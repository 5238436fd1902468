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

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <stdexcept>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "perqwalk/perqwalk.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("perqwalk-capi-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " " + PERQWALK_CLI_PATH + " " + args + " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSearchConfig =
    "[experiment]\nkind=search\ntrajectories=12\n[graph]\nnodes=12\n[noise]\nnu=1\ngamma=0.5\n"
    "[search]\ngrid_points=50\n";

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and status names") {
  CHECK(std::string(pqw_version()) == "0.1.0");
  CHECK(std::string(pqw_status_name(PQW_ERR_CONFIG)) == "config error");
}

TEST_CASE("config errors surface with a message") {
  pqw_config* c = nullptr;
  CHECK(pqw_config_parse("[experiment]\nkind=search\nbogus=1\n", &c) == PQW_ERR_CONFIG);
  CHECK(c == nullptr);
  CHECK(std::string(pqw_last_error()).find("experiment.bogus") != std::string::npos);
  CHECK(pqw_config_load("/nonexistent.ini", &c) == PQW_ERR_CONFIG);
  CHECK(pqw_config_parse(nullptr, &c) == PQW_ERR_INVALID_ARGUMENT);
}

TEST_CASE("resolved config and run through handles") {
  pqw_config* c = nullptr;
  REQUIRE(pqw_config_parse(kSearchConfig, &c) == PQW_OK);
  char* json = nullptr;
  REQUIRE(pqw_config_to_json(c, &json) == PQW_OK);
  CHECK(std::string(json).find("\"grid_points\": 50") != std::string::npos);
  pqw_string_free(json);

  const auto dir = scratch("run");
  pqw_report* r = nullptr;
  REQUIRE(pqw_run(c, dir.c_str(), &r) == PQW_OK);
  CHECK(pqw_report_file_count(r) == 2);
  CHECK(std::string(pqw_report_file(r, 0)) == "search.csv");
  CHECK(pqw_report_file(r, 9) == nullptr);
  char* summary = nullptr;
  REQUIRE(pqw_report_summary_json(r, &summary) == PQW_OK);
  CHECK(std::string(summary).find("\"p_succ\"") != std::string::npos);
  pqw_string_free(summary);
  pqw_report_free(r);

  // A sweep without axes is a configuration problem.
  CHECK(pqw_sweep(c, dir.c_str(), &r) == PQW_ERR_CONFIG);
  CHECK(r == nullptr);
  pqw_config_free(c);
}

TEST_CASE("runtime failures map to the runtime status") {
  pqw_config* c = nullptr;
  REQUIRE(pqw_config_parse(kSearchConfig, &c) == PQW_OK);
  pqw_report* r = nullptr;
  CHECK(pqw_run(c, "/dev/null/cannot-exist", &r) == PQW_ERR_RUNTIME);
  CHECK(std::string(pqw_last_error()).size() > 0);
  pqw_config_free(c);
}

TEST_CASE("graph handles") {
  pqw_graph* g = nullptr;
  REQUIRE(pqw_graph_create("star", 4, &g) == PQW_OK);
  CHECK(pqw_graph_node_count(g) == 4);
  CHECK(pqw_graph_edge_count(g) == 3);
  std::vector<double> l(16);
  REQUIRE(pqw_graph_laplacian(g, l.data(), l.size()) == PQW_OK);
  CHECK(l[0] == -3.0);
  CHECK(l[1] == 1.0);
  CHECK(l[5] == -1.0);
  CHECK(pqw_graph_laplacian(g, l.data(), 3) == PQW_ERR_INVALID_ARGUMENT);
  pqw_graph_free(g);
  CHECK(pqw_graph_create("torus", 4, &g) == PQW_ERR_INVALID_ARGUMENT);
  CHECK(pqw_graph_create("ring", 2, &g) == PQW_ERR_RUNTIME);

  const auto dir = scratch("graph");
  write(dir / "g.txt", "n=3\n0 1\n1 2\n");
  REQUIRE(pqw_graph_load((dir / "g.txt").c_str(), &g) == PQW_OK);
  CHECK(pqw_graph_edge_count(g) == 2);
  pqw_graph_free(g);
}

TEST_CASE("closed forms") {
  double p = 0.0;
  REQUIRE(pqw_grover_probability(16, 2.0 * M_PI, &p) == PQW_OK);
  CHECK(p == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pqw_grover_probability(1, 1.0, &p) == PQW_ERR_INVALID_ARGUMENT);
  std::vector<double> d(101);
  REQUIRE(pqw_bessel_distribution(101, 50, 3.0, d.data(), d.size()) == PQW_OK);
  CHECK(d[53] == doctest::Approx(std::pow(std::cyl_bessel_j(3.0, 6.0), 2)).epsilon(1e-12));
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  const auto dir = scratch("cli-codes");
  write(dir / "ok.ini", kSearchConfig);
  write(dir / "bad.ini", "[experiment]\nkind=search\n[noise]\nnu=7\n");
  CHECK(cli("validate " + (dir / "ok.ini").string()) == 0);
  CHECK(cli("validate " + (dir / "bad.ini").string()) == 1);
  CHECK(cli("run " + (dir / "bad.ini").string()) == 1);
  CHECK(cli("run " + (dir / "missing.ini").string()) == 1);
  CHECK(cli("frobnicate x") == 1);
  CHECK(cli("run -q " + (dir / "ok.ini").string() + " -o " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(cli("run -q " + (dir / "ok.ini").string() + " -o /dev/null/x") == 2);
  CHECK(cli("run -q " + (dir / "ok.ini").string() + " -o " + (dir / "o2").string(),
            "PERQWALK_THREADS=lots") == 1);
}

TEST_CASE("thread override leaves data files unchanged") {
  const auto dir = scratch("cli-threads");
  write(dir / "c.ini", kSearchConfig);
  const auto cfg = (dir / "c.ini").string();
  REQUIRE(cli("run -q " + cfg + " -o " + (dir / "a").string(), "PERQWALK_THREADS=1") == 0);
  REQUIRE(cli("run -q " + cfg + " -o " + (dir / "b").string(), "PERQWALK_THREADS=8") == 0);
  REQUIRE(cli("run -q " + cfg + " -o " + (dir / "c").string() + " -t 3") == 0);
  for (const char* f : {"search.csv", "summary.json"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "c" / f));
  }
  // The manifest echoes the resolved thread count, so only data files match.
  CHECK(slurp(dir / "b" / "manifest.json").find("\"threads\": 8") != std::string::npos);
}

TEST_CASE("sweep from the command line") {
  const auto dir = scratch("cli-sweep");
  write(dir / "s.ini", std::string(kSearchConfig) + "[sweep]\ngamma=0.5,2\n");
  CHECK(cli("sweep -q " + (dir / "s.ini").string() + " -o " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "sweep.csv"));
  CHECK(fs::exists(dir / "out" / "point_001" / "search.csv"));
}

}  // TEST_SUITE
