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

#include "perqwalk/perqwalk.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "perqwalk/experiment.hpp"
#include "perqwalk/graph.hpp"
#include "perqwalk/observables.hpp"
#include "perqwalk/search.hpp"
#include "perqwalk/version.hpp"

struct pqw_config {
  perqwalk::ExperimentConfig config;
};

struct pqw_report {
  perqwalk::RunReport report;
};

struct pqw_graph {
  perqwalk::Graph graph;
};

namespace {

thread_local std::string g_last_error;

pqw_status fail(pqw_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps exceptions escaping the core onto status codes; nothing crosses the
// C boundary.
template <class F>
pqw_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const perqwalk::ConfigError& e) {
    return fail(PQW_ERR_CONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PQW_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PQW_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(PQW_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(PQW_ERR_RUNTIME, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define PQW_REQUIRE(cond, what) \
  if (!(cond)) return fail(PQW_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* pqw_version(void) { return perqwalk::kVersion; }

const char* pqw_last_error(void) { return g_last_error.c_str(); }

const char* pqw_status_name(pqw_status status) {
  switch (status) {
    case PQW_OK: return "ok";
    case PQW_ERR_CONFIG: return "config error";
    case PQW_ERR_RUNTIME: return "runtime error";
    case PQW_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PQW_ERR_IO: return "i/o error";
  }
  return "unknown status";
}

void pqw_string_free(char* s) { std::free(s); }

pqw_status pqw_config_load(const char* path, pqw_config** out) {
  PQW_REQUIRE(path != nullptr && out != nullptr, "pqw_config_load: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new pqw_config{perqwalk::load_config(path)};
    return PQW_OK;
  });
}

pqw_status pqw_config_parse(const char* text, pqw_config** out) {
  PQW_REQUIRE(text != nullptr && out != nullptr, "pqw_config_parse: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new pqw_config{perqwalk::parse_config_string(text)};
    return PQW_OK;
  });
}

void pqw_config_free(pqw_config* config) { delete config; }

pqw_status pqw_config_set_threads(pqw_config* config, size_t threads) {
  PQW_REQUIRE(config != nullptr, "pqw_config_set_threads: null config");
  config->config.threads = threads;
  return PQW_OK;
}

pqw_status pqw_config_set_output(pqw_config* config, const char* dir) {
  PQW_REQUIRE(config != nullptr && dir != nullptr, "pqw_config_set_output: null argument");
  PQW_REQUIRE(*dir != '\0', "pqw_config_set_output: empty directory");
  return guarded([&] {
    config->config.output = dir;
    return PQW_OK;
  });
}

pqw_status pqw_config_output(const pqw_config* config, char** out) {
  PQW_REQUIRE(config != nullptr && out != nullptr, "pqw_config_output: null argument");
  return guarded([&] {
    *out = dup_string(config->config.output);
    return PQW_OK;
  });
}

pqw_status pqw_config_to_json(const pqw_config* config, char** out) {
  PQW_REQUIRE(config != nullptr && out != nullptr, "pqw_config_to_json: null argument");
  return guarded([&] {
    *out = dup_string(config->config.to_json().dump(2));
    return PQW_OK;
  });
}

pqw_status pqw_run(const pqw_config* config, const char* outdir, pqw_report** out) {
  PQW_REQUIRE(config != nullptr && out != nullptr, "pqw_run: null argument");
  *out = nullptr;
  return guarded([&] {
    const std::filesystem::path dir = outdir != nullptr ? outdir : config->config.output;
    *out = new pqw_report{perqwalk::run_experiment(config->config, dir)};
    return PQW_OK;
  });
}

pqw_status pqw_sweep(const pqw_config* config, const char* outdir, pqw_report** out) {
  PQW_REQUIRE(config != nullptr && out != nullptr, "pqw_sweep: null argument");
  *out = nullptr;
  return guarded([&] {
    const std::filesystem::path dir = outdir != nullptr ? outdir : config->config.output;
    *out = new pqw_report{perqwalk::run_sweep(config->config, dir)};
    return PQW_OK;
  });
}

void pqw_report_free(pqw_report* report) { delete report; }

size_t pqw_report_file_count(const pqw_report* report) {
  return report == nullptr ? 0 : report->report.files.size();
}

const char* pqw_report_file(const pqw_report* report, size_t index) {
  if (report == nullptr || index >= report->report.files.size()) return nullptr;
  return report->report.files[index].c_str();
}

pqw_status pqw_report_summary_json(const pqw_report* report, char** out) {
  PQW_REQUIRE(report != nullptr && out != nullptr, "pqw_report_summary_json: null argument");
  return guarded([&] {
    *out = dup_string(report->report.summary.dump(2));
    return PQW_OK;
  });
}

pqw_status pqw_graph_create(const char* type, size_t nodes, pqw_graph** out) {
  PQW_REQUIRE(type != nullptr && out != nullptr, "pqw_graph_create: null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string t = type;
    perqwalk::Graph g;
    if (t == "ring") {
      g = perqwalk::line_graph(nodes, true);
    } else if (t == "line") {
      g = perqwalk::line_graph(nodes, false);
    } else if (t == "complete") {
      g = perqwalk::complete_graph(nodes);
    } else if (t == "star") {
      g = perqwalk::star_graph(nodes);
    } else {
      return fail(PQW_ERR_INVALID_ARGUMENT, "unknown graph type '" + t + "'");
    }
    *out = new pqw_graph{std::move(g)};
    return PQW_OK;
  });
}

pqw_status pqw_graph_load(const char* path, pqw_graph** out) {
  PQW_REQUIRE(path != nullptr && out != nullptr, "pqw_graph_load: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new pqw_graph{perqwalk::load_edge_list(path)};
    return PQW_OK;
  });
}

void pqw_graph_free(pqw_graph* graph) { delete graph; }

size_t pqw_graph_node_count(const pqw_graph* graph) {
  return graph == nullptr ? 0 : graph->graph.node_count();
}

size_t pqw_graph_edge_count(const pqw_graph* graph) {
  return graph == nullptr ? 0 : graph->graph.edge_count();
}

pqw_status pqw_graph_laplacian(const pqw_graph* graph, double* out, size_t len) {
  PQW_REQUIRE(graph != nullptr && out != nullptr, "pqw_graph_laplacian: null argument");
  const size_t n = graph->graph.node_count();
  PQW_REQUIRE(len >= n * n, "pqw_graph_laplacian: buffer smaller than n*n");
  return guarded([&] {
    const Eigen::MatrixXd l = perqwalk::laplacian(graph->graph);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        out[i * n + j] = l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    return PQW_OK;
  });
}

pqw_status pqw_grover_probability(size_t nodes, double t, double* out) {
  PQW_REQUIRE(out != nullptr, "pqw_grover_probability: null output");
  return guarded([&] {
    try {
      *out = perqwalk::grover_probability(nodes, t);
    } catch (const std::invalid_argument& e) {
      return fail(PQW_ERR_INVALID_ARGUMENT, e.what());
    }
    return PQW_OK;
  });
}

pqw_status pqw_bessel_distribution(size_t nodes, size_t origin, double t, double* out,
                                   size_t len) {
  PQW_REQUIRE(out != nullptr, "pqw_bessel_distribution: null output");
  PQW_REQUIRE(len >= nodes, "pqw_bessel_distribution: buffer smaller than n");
  return guarded([&] {
    try {
      const auto d = perqwalk::bessel_distribution(nodes, origin, t);
      for (size_t k = 0; k < nodes; ++k) out[k] = d.probabilities[static_cast<Eigen::Index>(k)];
    } catch (const std::invalid_argument& e) {
      return fail(PQW_ERR_INVALID_ARGUMENT, e.what());
    }
    return PQW_OK;
  });
}

}  // extern "C"
